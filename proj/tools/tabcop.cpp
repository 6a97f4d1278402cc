// tabcop command line: prove, check, train, loop, bench.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tabcop/checker.hpp"
#include "tabcop/config.hpp"
#include "tabcop/gbt.hpp"
#include "tabcop/mcts.hpp"
#include "tabcop/problem.hpp"
#include "tabcop/training.hpp"

using namespace tabcop;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Config make_config(const std::string& file, const std::vector<std::string>& overrides) {
  Config cfg = file.empty() ? Config{} : load_config(file);
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    cfg.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
  }
  return cfg;
}

int cmd_prove(const std::string& problem, const std::string& out, const std::string& value_model,
              const std::string& policy_model, const Config& cfg) {
  if (value_model.empty() != policy_model.empty()) {
    throw UsageError("--value-model and --policy-model go together");
  }
  const Matrix m = prepare_matrix(load_problem(problem), cfg);
  std::optional<Models> models;
  if (!value_model.empty()) {
    models = Models{GbtModel::load_file(value_model), GbtModel::load_file(policy_model)};
  }
  const double cp = models ? cfg.cp_later : cfg.cp_initial;
  const std::string name = fs::path(problem).stem().string();
  const ProblemRun run = search_problem(name, m, cfg, models ? &*models : nullptr, cp, false);
  std::string text;
  for (const std::string& line : run.result.proof) text += line + '\n';
  if (run.result.outcome == Outcome::proved) {
    const check::Verdict v = check::check_proof_text(text, m);
    if (!v.ok) {
      std::cerr << "internal error: proof rejected by the checker: " << v.message << '\n';
      return 1;
    }
    const std::string path = out.empty() ? name + ".proof" : out;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + path);
    f << text;
  }
  std::cout << stats_line(name, run.result) << '\n';
  return run.result.outcome == Outcome::proved ? 0 : 1;
}

int cmd_check(const std::string& proof, const std::string& problem, const Config& cfg) {
  const Matrix m = prepare_matrix(load_problem(problem), cfg);
  const std::string text = slurp(proof);
  std::vector<check::Step> steps;
  try {
    steps = check::parse_proof(text);
  } catch (const ParseError& e) {
    std::cerr << proof << ":" << e.line() << ":" << e.column() << ": " << e.what() << '\n';
    return 2;
  }
  const check::Verdict v = check::check_proof(steps, m);
  if (v.ok) {
    std::cout << "OK\n";
    return 0;
  }
  std::cout << "REJECTED: " << v.message << '\n';
  for (const auto& [atom, value] : v.witness) std::cout << "  " << atom << " = " << (value ? "true" : "false") << '\n';
  return 1;
}

int cmd_train(const std::string& data_file, const std::string& model_out, const Config& cfg) {
  const Dataset d = load_dataset(data_file, cfg.feature_dim);
  TrainLog log;
  Dataset merged = d;
  dedupe_max(merged.rows);
  const GbtModel m = train(merged, cfg.learner, cfg.seed, &log);
  m.save_file(model_out);
  std::cout << "rows\t" << merged.rows.size() << "\ntrees\t" << m.trees.size() << "\ntrain_rmse\t"
            << (log.train_rmse.empty() ? 0.0 : log.train_rmse.back()) << '\n';
  return 0;
}

int cmd_loop(const std::string& dir, std::size_t iterations, const std::string& out, const Config& cfg) {
  const auto reports = run_loop(dir, out, iterations, cfg);
  std::cout << "iteration\tattempted\tproved\tcumulative\tvalue_rows\tpolicy_rows\twall_s\n";
  for (const auto& r : reports) {
    std::cout << r.iteration << '\t' << r.attempted << '\t' << r.proved << '\t' << r.cumulative_proved
              << '\t' << r.value_rows << '\t' << r.policy_rows << '\t' << r.wall_s << '\n';
  }
  return 0;
}

int cmd_bench(const std::string& dir, const Config& cfg) {
  std::size_t proved = 0, inferences = 0, total = 0;
  std::cout << "problem\tstatus\tinferences\tplayouts\tbigsteps\tproof_length\n";
  for (const std::string& f : list_problems(dir)) {
    const Matrix m = prepare_matrix(load_problem(f), cfg);
    const ProblemRun run = search_problem(fs::path(f).stem().string(), m, cfg, nullptr, cfg.cp_initial, false);
    if (run.result.outcome == Outcome::proved) {
      std::string text;
      for (const std::string& line : run.result.proof) text += line + '\n';
      if (!check::check_proof_text(text, m).ok) throw CheckRejected("proof of " + f + " rejected");
      ++proved;
    }
    inferences += run.result.inferences;
    ++total;
    std::cout << stats_line(run.name, run.result) << '\n';
  }
  std::cout << "# total\t" << total << "\n# proved\t" << proved << "\n# inferences\t" << inferences << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabcop: connection tableau prover with learned guidance"};
  app.require_subcommand(1);
  std::string config_file;
  std::vector<std::string> overrides;

  std::string problem, proof, out, value_model, policy_model, dir, data_file, model_out;
  std::size_t iterations = 1;

  auto* prove = app.add_subcommand("prove", "search for a proof of one problem");
  prove->add_option("problem", problem)->required();
  prove->add_option("-o,--output", out, "proof file (default <name>.proof)");
  prove->add_option("--value-model", value_model);
  prove->add_option("--policy-model", policy_model);

  auto* check = app.add_subcommand("check", "verify a proof trace");
  check->add_option("proof", proof)->required();
  check->add_option("problem", problem)->required();

  auto* train_cmd = app.add_subcommand("train", "fit a model to a dataset");
  train_cmd->add_option("dataset", data_file)->required();
  train_cmd->add_option("model", model_out)->required();

  auto* loop = app.add_subcommand("loop", "alternate proving and training");
  loop->add_option("problems", dir)->required();
  loop->add_option("--iterations", iterations)->check(CLI::PositiveNumber);
  std::string loop_out = "out";
  loop->add_option("--out", loop_out, "output directory");

  auto* bench = app.add_subcommand("bench", "run the default guidance over a directory");
  bench->add_option("problems", dir)->required();

  for (auto* sub : {prove, check, train_cmd, loop, bench}) {
    sub->add_option("--config", config_file, "ini file with run settings");
    sub->add_option("--set", overrides, "override one setting, key=value");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const Config cfg = make_config(config_file, overrides);
    if (*prove) return cmd_prove(problem, out, value_model, policy_model, cfg);
    if (*check) return cmd_check(proof, problem, cfg);
    if (*train_cmd) return cmd_train(data_file, model_out, cfg);
    if (*loop) return cmd_loop(dir, iterations, loop_out, cfg);
    if (*bench) return cmd_bench(dir, cfg);
  } catch (const ParseError& e) {
    std::cerr << "parse error at line " << e.line() << ", column " << e.column() << ": " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const CheckRejected& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
