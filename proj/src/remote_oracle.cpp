#include "hnc/remote_oracle.hpp"

#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

namespace hnc {

using json = nlohmann::json;

namespace {

std::vector<double> to_std(const Eigen::Ref<const Vector>& v) { return {v.data(), v.data() + v.size()}; }

// Splits scheme://host[:port]/path into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const auto scheme = url.find("://");
  require(scheme != std::string::npos, fmt::format("remote oracle: endpoint '{}' lacks a scheme", url));
  require(url.compare(0, scheme, "http") == 0, fmt::format("remote oracle: only http endpoints are supported ('{}')", url));
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string encode_oracle_request(std::span<const Exemplar> context, const Eigen::Ref<const Vector>& x) {
  json exemplars = json::array();
  for (const auto& e : context) exemplars.push_back({{"x", to_std(e.x)}, {"y", to_std(e.y)}});
  return json{{"exemplars", std::move(exemplars)}, {"query", to_std(x)}}.dump();
}

RemoteOracle::RemoteOracle(RemoteOracleConfig config) : config_(std::move(config)) {
  require(config_.timeout_ms > 0, "remote oracle: timeout must be positive");
  require(config_.max_retries >= 0, "remote oracle: max_retries must be non-negative");
  require(config_.max_in_flight >= 1, "remote oracle: max_in_flight must be >= 1");
  std::tie(base_, path_) = split_endpoint(config_.endpoint);
}

Vector RemoteOracle::predict(std::span<const Exemplar> context, const Eigen::Ref<const Vector>& x) const {
  const std::string request_id = fmt::format("req-{}", next_request_.fetch_add(1));
  const std::string body = encode_oracle_request(context, x);

  const int limit = config_.supports_concurrency ? config_.max_in_flight : 1;
  {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < limit; });
    ++in_flight_;
  }
  struct Release {
    const RemoteOracle* self;
    ~Release() {
      {
        std::lock_guard lock(self->slots_mutex_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};

  return call(body, request_id);
}

Vector RemoteOracle::call(const std::string& body, const std::string& request_id) const {
  httplib::Client client(base_);
  const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const httplib::Headers headers{{"X-Request-Id", request_id}};

  httplib::Result res;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    res = client.Post(path_, headers, body, "application/json");
    if (res) break;
  }
  if (!res) {
    throw OracleFailure(fmt::format("remote oracle {}: transport error ({}) after {} attempts", request_id,
                                    httplib::to_string(res.error()), config_.max_retries + 1),
                        request_id);
  }
  if (res->status < 200 || res->status >= 300) {
    throw OracleFailure(fmt::format("remote oracle {}: HTTP status {}", request_id, res->status), request_id);
  }

  const json reply = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("prediction") ||
      !reply["prediction"].is_array()) {
    throw OracleFailure(fmt::format("remote oracle {}: response does not match schema", request_id), request_id);
  }
  const json& pred = reply["prediction"];
  if (config_.y_dim > 0 && static_cast<Eigen::Index>(pred.size()) != config_.y_dim) {
    throw OracleFailure(fmt::format("remote oracle {}: prediction has length {}, expected {}", request_id,
                                    pred.size(), config_.y_dim),
                        request_id);
  }
  Vector out(static_cast<Eigen::Index>(pred.size()));
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!pred[i].is_number()) {
      throw OracleFailure(fmt::format("remote oracle {}: non-numeric prediction entry", request_id), request_id);
    }
    out[static_cast<Eigen::Index>(i)] = pred[i].get<double>();
  }
  return out;
}

struct OracleServer::Impl {
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

namespace {

Vector vector_from(const json& j) {
  require(j.is_array(), "expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    require(j[i].is_number(), "expected numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

}  // namespace

OracleServer::OracleServer(const CompletionOracle& oracle, int port) : impl_(std::make_unique<Impl>()) {
  impl_->server.Post(".*", [&oracle](const httplib::Request& req, httplib::Response& res) {
    try {
      const json body = json::parse(req.body);
      std::vector<Exemplar> context;
      int id = 0;
      for (const auto& e : body.at("exemplars")) {
        context.push_back(Exemplar{id++, vector_from(e.at("x")), vector_from(e.at("y")), -1});
      }
      const Vector pred = oracle.predict(context, vector_from(body.at("query")));
      res.set_content(json{{"prediction", to_std(pred)}}.dump(), "application/json");
    } catch (const std::exception& err) {
      res.status = 400;
      res.set_content(json{{"error", err.what()}}.dump(), "application/json");
    }
  });
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  } else {
    impl_->port = impl_->server.bind_to_port("127.0.0.1", port) ? port : -1;
  }
  if (impl_->port <= 0) throw std::runtime_error("OracleServer: could not bind to 127.0.0.1");
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

OracleServer::~OracleServer() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int OracleServer::port() const { return impl_->port; }

std::string OracleServer::endpoint() const { return fmt::format("http://127.0.0.1:{}/predict", impl_->port); }

}  // namespace hnc
