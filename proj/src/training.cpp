#include "tabcop/training.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "tabcop/checker.hpp"
#include "tabcop/features.hpp"
#include "tabcop/guidance.hpp"

namespace tabcop {

namespace fs = std::filesystem;

std::vector<std::string> list_problems(const std::string& dir) {
  std::vector<std::string> out;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".p") out.push_back(e.path().string());
  }
  if (out.empty()) throw std::runtime_error("no problem files (*.p) in " + dir);
  std::sort(out.begin(), out.end());
  return out;
}

Matrix prepare_matrix(const Matrix& m, const Config& cfg) {
  return cfg.equality_axioms ? generate_equality_axioms(m) : m;
}

ProblemRun search_problem(const std::string& name, const Matrix& prepared, const Config& cfg,
                          const Models* models, double cp, bool collect_data) {
  const Calculus calc(prepared, cfg);
  std::unique_ptr<Guidance> guidance;
  if (models) {
    guidance = std::make_unique<ModelGuidance>(calc, models->value, models->policy, cfg.temperature);
  } else {
    guidance = std::make_unique<DefaultGuidance>();
  }
  Search search(calc, *guidance, cfg, cp);
  ProblemRun run;
  run.name = name;
  run.result = search.run();
  if (collect_data) {
    FeatureExtractor features(calc, cfg.feature_dim);
    run.data = extract_training_data(search, features, cfg);
  }
  return run;
}

std::string format_report(const IterationReport& r) {
  std::ostringstream out;
  out << "# iteration\t" << r.iteration << '\n';
  out << "problem\tstatus\tinferences\tplayouts\tbigsteps\tproof_length\n";
  for (const std::string& s : r.stats) out << s << '\n';
  out << "# attempted\t" << r.attempted << '\n';
  out << "# proved\t" << r.proved << '\n';
  out << "# cumulative_proved\t" << r.cumulative_proved << '\n';
  out << "# value_rows\t" << r.value_rows << '\n';
  out << "# policy_rows\t" << r.policy_rows << '\n';
  out << "# value_model\t" << r.value_model << '\n';
  out << "# policy_model\t" << r.policy_model << '\n';
  return out.str();
}

GbtModel train_models_on(const Dataset& data, const Config& cfg, std::uint64_t seed) {
  Dataset d = data;
  dedupe_max(d.rows);
  if (d.rows.empty()) {
    GbtModel m;
    m.dim = d.dim;
    m.eta = cfg.learner.eta;
    return m;
  }
  return train(d, cfg.learner, seed);
}

namespace {

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

Dataset previous_rows(const fs::path& file, std::size_t dim) {
  if (!fs::exists(file)) return Dataset{dim, {}};
  return load_dataset(file.string(), dim);
}

} // namespace

IterationReport run_iteration(const std::string& problem_dir, const std::string& out_dir,
                              std::size_t k, const Config& cfg, const Models* models,
                              std::set<std::string>& proved_so_far) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> files = list_problems(problem_dir);
  const fs::path iter_dir = fs::path(out_dir) / ("iter" + std::to_string(k));
  fs::create_directories(iter_dir / "proofs");

  // parse everything up front so a bad file fails before any search
  std::vector<std::string> names;
  std::vector<Matrix> matrices;
  for (const std::string& f : files) {
    names.push_back(fs::path(f).stem().string());
    matrices.push_back(prepare_matrix(load_problem(f), cfg));
  }

  const double cp = models ? cfg.cp_later : cfg.cp_initial;
  std::vector<ProblemRun> runs(files.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next++;
      if (i >= files.size()) return;
      try {
        runs[i] = search_problem(names[i], matrices[i], cfg, models, cp, true);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next = files.size();
      }
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(cfg.workers, files.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  IterationReport rep;
  rep.iteration = k;
  rep.attempted = files.size();
  const fs::path prev_dir = fs::path(out_dir) / ("iter" + std::to_string(k - 1));
  Dataset value = k > 0 ? previous_rows(prev_dir / "value.data", cfg.feature_dim) : Dataset{cfg.feature_dim, {}};
  Dataset policy = k > 0 ? previous_rows(prev_dir / "policy.data", cfg.feature_dim) : Dataset{cfg.feature_dim, {}};

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ProblemRun& r = runs[i];
    rep.stats.push_back(stats_line(r.name, r.result));
    if (r.result.outcome == Outcome::proved) {
      std::string text;
      for (const std::string& line : r.result.proof) text += line + '\n';
      const check::Verdict v = check::check_proof_text(text, matrices[i]);
      if (!v.ok) throw CheckRejected("proof of " + r.name + " rejected: " + v.message);
      write_text(iter_dir / "proofs" / (r.name + ".proof"), text);
      ++rep.proved;
      proved_so_far.insert(r.name);
    }
    value.rows.insert(value.rows.end(), r.data.value.begin(), r.data.value.end());
    policy.rows.insert(policy.rows.end(), r.data.policy.begin(), r.data.policy.end());
  }
  rep.cumulative_proved = proved_so_far.size();
  rep.value_rows = value.rows.size();
  rep.policy_rows = policy.rows.size();

  save_dataset((iter_dir / "value.data").string(), value);
  save_dataset((iter_dir / "policy.data").string(), policy);
  const std::uint64_t seed = cfg.seed + 2 * k;
  train_models_on(value, cfg, seed).save_file((iter_dir / "value.model").string());
  train_models_on(policy, cfg, seed + 1).save_file((iter_dir / "policy.model").string());
  rep.value_model = "iter" + std::to_string(k) + "/value.model";
  rep.policy_model = "iter" + std::to_string(k) + "/policy.model";

  write_text(iter_dir / "report.tsv", format_report(rep));
  rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

std::vector<IterationReport> run_loop(const std::string& problem_dir, const std::string& out_dir,
                                      std::size_t iterations, const Config& cfg) {
  std::vector<IterationReport> reports;
  std::set<std::string> proved;
  std::optional<Models> models;
  for (std::size_t k = 0; k < iterations; ++k) {
    reports.push_back(run_iteration(problem_dir, out_dir, k, cfg, models ? &*models : nullptr, proved));
    const fs::path dir = fs::path(out_dir) / ("iter" + std::to_string(k));
    models = Models{GbtModel::load_file((dir / "value.model").string()),
                    GbtModel::load_file((dir / "policy.model").string())};
  }
  return reports;
}

} // namespace tabcop
