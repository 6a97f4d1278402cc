#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tabcop/training.hpp"

using namespace tabcop;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("tabcop_training_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path small_corpus() {
  const fs::path dir = scratch("problems");
  const fs::path src = fs::path(TABCOP_SOURCE_DIR) / "corpus";
  for (const char* n : {"tiny", "socrates", "eq_chain_4", "ancestor", "unprovable_const", "pelletier12"}) {
    fs::copy_file(src / (std::string(n) + ".p"), dir / (std::string(n) + ".p"));
  }
  return dir;
}

Config quick() {
  Config cfg;
  cfg.inference_limit = 5000;
  cfg.learner.rounds = 30;
  cfg.feature_dim = 2000;
  return cfg;
}

} // namespace

TEST_CASE("empty problem directory is an error") {
  const fs::path dir = scratch("empty");
  CHECK_THROWS(list_problems(dir.string()));
  CHECK_THROWS(run_loop(dir.string(), (dir / "out").string(), 1, quick()));
}

TEST_CASE("loop layout, accumulation and reproducibility") {
  const fs::path problems = small_corpus();
  const fs::path out = scratch("out_a");
  const Config cfg = quick();
  const auto reports = run_loop(problems.string(), out.string(), 2, cfg);
  REQUIRE(reports.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    const fs::path it = out / ("iter" + std::to_string(k));
    for (const char* f : {"value.data", "policy.data", "value.model", "policy.model", "report.tsv"}) {
      CHECK(fs::exists(it / f));
    }
    CHECK(reports[k].attempted == 6);
    CHECK(fs::exists(it / "proofs" / "tiny.proof"));
    CHECK_FALSE(fs::exists(it / "proofs" / "unprovable_const.proof"));
    CHECK(slurp(it / "report.tsv") == format_report(reports[k]));
  }
  CHECK(reports[0].proved >= 4);
  CHECK(reports[1].cumulative_proved >= reports[0].cumulative_proved);

  // append-only datasets
  const std::string v0 = slurp(out / "iter0" / "value.data");
  const std::string v1 = slurp(out / "iter1" / "value.data");
  CHECK(v1.substr(0, v0.size()) == v0);
  CHECK(reports[1].value_rows >= reports[0].value_rows);

  const fs::path again = scratch("out_b");
  run_loop(problems.string(), again.string(), 2, cfg);
  for (const char* f : {"iter0/report.tsv", "iter1/report.tsv", "iter0/value.model", "iter1/policy.model",
                        "iter1/value.data"}) {
    CHECK(slurp(out / f) == slurp(again / f));
  }
}

TEST_CASE("several workers give the same results") {
  const fs::path problems = small_corpus();
  Config one = quick(), four = quick();
  four.workers = 4;
  const fs::path a = scratch("w1"), b = scratch("w4");
  run_loop(problems.string(), a.string(), 1, one);
  run_loop(problems.string(), b.string(), 1, four);
  CHECK(slurp(a / "iter0/report.tsv") == slurp(b / "iter0/report.tsv"));
  CHECK(slurp(a / "iter0/policy.model") == slurp(b / "iter0/policy.model"));
}

TEST_CASE("empty datasets give a constant model") {
  const GbtModel m = train_models_on(Dataset{10, {}}, quick(), 0);
  CHECK(m.trees.empty());
  CHECK(m.base == 0.0);
  CHECK(m.dim == 10);
}
