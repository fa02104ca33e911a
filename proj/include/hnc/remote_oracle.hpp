#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>

#include "hnc/oracle.hpp"

namespace hnc {

// Wire protocol (HTTP POST, JSON):
//   request  {"exemplars":[{"x":[...],"y":[...]},...],"query":[...]}
//   response {"prediction":[...]}
// Non-2xx status or a body that does not match the schema is an OracleFailure.

struct RemoteOracleConfig {
  std::string endpoint;  // e.g. http://127.0.0.1:8080/predict
  int timeout_ms = 5000;
  int max_retries = 2;   // extra attempts after a transport error
  bool supports_concurrency = false;
  int max_in_flight = 4;  // only used when supports_concurrency
  Eigen::Index y_dim = 0;  // expected prediction length; 0 accepts any
};

class RemoteOracle final : public CompletionOracle {
 public:
  explicit RemoteOracle(RemoteOracleConfig config);

  Vector predict(std::span<const Exemplar> context, const Eigen::Ref<const Vector>& x) const override;
  std::string_view name() const override { return "remote"; }
  bool supports_concurrency() const override { return config_.supports_concurrency; }

 private:
  Vector call(const std::string& body, const std::string& request_id) const;

  RemoteOracleConfig config_;
  std::string base_;  // scheme://host:port
  std::string path_;
  mutable std::atomic<unsigned long long> next_request_{0};
  mutable std::mutex slots_mutex_;
  mutable std::condition_variable slots_cv_;
  mutable int in_flight_ = 0;
};

std::string encode_oracle_request(std::span<const Exemplar> context, const Eigen::Ref<const Vector>& x);

/// Serves any CompletionOracle over the wire protocol on 127.0.0.1. Used as
/// a loopback stub for the remote adapter.
class OracleServer {
 public:
  /// port 0 picks a free port.
  explicit OracleServer(const CompletionOracle& oracle, int port = 0);
  ~OracleServer();
  OracleServer(const OracleServer&) = delete;
  OracleServer& operator=(const OracleServer&) = delete;

  int port() const;
  std::string endpoint() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace hnc
