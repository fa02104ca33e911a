#include "hnc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hnc/bounds.hpp"
#include "hnc/config.hpp"
#include "hnc/experiments.hpp"
#include "hnc/oracle.hpp"
#include "hnc/retrieval.hpp"
#include "hnc/selftest.hpp"

namespace hnc {

namespace {

using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError(fmt::format("cannot write output file '{}'", path));
  f << text;
  if (!f.flush()) throw UsageError(fmt::format("failed writing output file '{}'", path));
}

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "Config file (key = value lines)");
  cmd->add_option("-s,--set", o.overrides, "Override a config key: --set key=value (repeatable)");
  cmd->add_option("-o,--output", o.output, "Output CSV path (overrides config 'output')");
  cmd->add_option("--seed", o.seed, "Root seed (overrides config 'seed')");
  cmd->add_option("--trials", o.trials, "Trial count (overrides config 'trials')");
}

ExperimentConfig resolve_config(const CommonOptions& o, ExperimentConfig cfg = {}) {
  if (!o.config_path.empty()) cfg = load_config(o.config_path, cfg);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos, fmt::format("--set expects key=value, got '{}'", kv));
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.output.empty()) cfg.output = o.output;
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  cfg.validate();
  return cfg;
}

Matrix matrix_from(const json& j, const char* field) {
  require(j.is_array() && !j.empty(), fmt::format("retrieve: '{}' must be a non-empty array of rows", field));
  const auto rows = static_cast<Eigen::Index>(j.size());
  require(j[0].is_array(), fmt::format("retrieve: '{}' must be an array of rows", field));
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            fmt::format("retrieve: '{}' rows differ in length", field));
    for (Eigen::Index c = 0; c < cols; ++c) {
      require(row[static_cast<std::size_t>(c)].is_number(), fmt::format("retrieve: '{}' has a non-number", field));
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

std::vector<double> to_std(const Eigen::Ref<const RowVector>& v) { return {v.data(), v.data() + v.size()}; }

// Input: {"gamma":g, "xi_q":[[..]..], "xi_k":[[..]..], "w_v":[[..]..] (optional),
//         "sigma":[..], "contexts":[[lambda_1], [lambda_2], ...]}
int run_retrieve(const std::string& path, std::ostream& out) {
  std::ifstream f(path);
  if (!f) throw UsageError(fmt::format("cannot read input file '{}'", path));
  json in;
  try {
    in = json::parse(f);
  } catch (const json::parse_error& e) {
    throw UsageError(fmt::format("retrieve: {}", e.what()));
  }
  for (const char* key : {"gamma", "xi_q", "xi_k", "sigma", "contexts"}) {
    require(in.contains(key), fmt::format("retrieve: missing '{}'", key));
  }
  require(in["gamma"].is_number(), "retrieve: 'gamma' must be a number");
  std::optional<Matrix> w_v;
  if (in.contains("w_v")) w_v = matrix_from(in["w_v"], "w_v");
  const HncModel model(matrix_from(in["xi_q"], "xi_q"), matrix_from(in["xi_k"], "xi_k"), in["gamma"].get<double>(),
                       std::move(w_v));
  const Matrix sigma_row = matrix_from(json::array({in["sigma"]}), "sigma");
  const QueryState query(model, sigma_row.row(0).transpose());
  const ContextSet ctx(matrix_from(in["contexts"], "contexts").transpose());

  const RetrievalResult r = hnc_retrieve(model, ctx, query);
  const AttentionView a = attention_view(model, ctx, query);
  const json result = {{"scores", to_std(r.scores.transpose())},
                       {"weights", to_std(r.weights.transpose())},
                       {"u_new", to_std(r.u_new)},
                       {"attention_output", to_std(a.output)}};
  out << result.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Contextual retrieval from Hopfield networks: bound verification and exemplar-selection studies", "hnc"};
  app.require_subcommand(1);

  CommonOptions sweep_opts, kstudy_opts, compare_opts;
  auto* sweep = app.add_subcommand("bound-sweep", "Verify the retrieval-error bound over a gamma x M x t/M grid");
  add_common(sweep, sweep_opts);
  auto* kstudy = app.add_subcommand("k-study", "Mean score versus number of exemplars K per strategy");
  add_common(kstudy, kstudy_opts);
  auto* compare = app.add_subcommand("compare", "Compare random, metric and active selection");
  add_common(compare, compare_opts);
  std::string retrieve_path;
  auto* retrieve = app.add_subcommand("retrieve", "Run one HN-C retrieval from a JSON file");
  retrieve->add_option("input", retrieve_path, "JSON instance file")->required();
  auto* selftest = app.add_subcommand("selftest", "Run the invariant suites and print defaults");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*selftest) return run_selftest(out) ? kExitOk : kExitInvariant;
    if (*retrieve) return run_retrieve(retrieve_path, out);

    if (*sweep) {
      const auto cfg = resolve_config(sweep_opts);
      const auto res = run_bound_sweep(cfg);
      if (cfg.output.empty()) {
        out << res.csv;
        return kExitOk;
      }
      write_text(cfg.output, res.csv);
      out << fmt::format("bound-sweep: {} instances, 0 violations, max error/bound ratio {:.6g}\n", res.reports.size(),
                         res.max_ratio);
      return kExitOk;
    }
    if (*kstudy) {
      const auto cfg = resolve_config(kstudy_opts);
      const auto res = run_k_study(cfg);
      if (cfg.output.empty()) {
        out << res.csv;
        return kExitOk;
      }
      write_text(cfg.output, res.csv);
      for (Strategy s : cfg.strategies) {
        for (int k : cfg.k_values) {
          const auto st = sample_stats(arm_means(res.records, s, k));
          out << fmt::format("k-study: {:<13} K={:<3} mean={:.6f} sd={:.6f}\n", to_string(s), k, st.mean,
                             std::sqrt(st.variance));
        }
      }
      return kExitOk;
    }
    if (*compare) {
      ExperimentConfig base;
      base.strategies = {Strategy::random, Strategy::metric, Strategy::active};
      const auto cfg = resolve_config(compare_opts, base);
      const auto res = run_strategy_comparison(cfg);
      if (cfg.output.empty()) {
        out << res.csv << res.json;
      } else {
        write_text(cfg.output, res.csv);
        write_text(cfg.output + ".json", res.json);
      }
      return kExitOk;
    }
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace hnc
