#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bwk/matrix_io.hpp"
#include "bwk/results_io.hpp"
#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / "bwk_cli_test") {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }

  const fs::path& dir() const { return dir_; }

  Result run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + BWK_CLI_PATH + "\" " + args + " > \"" + out.string() +
                            "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = status == 0 ? 0 : 1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path dir_;
};

}  // namespace

TEST_CASE("cli run and slope") {
  Sandbox box;
  const auto cfg = box.dir() / "exp.json";
  std::ofstream(cfg) << R"({
    "policy": [{"type": "exp3_bwk"}, {"type": "uniform"}],
    "environment": {"type": "stochastic", "c_min": 0.5, "arms": [
      {"reward": {"dist": "bernoulli", "p": 0.9}, "cost": {"dist": "point", "value": 0.5}},
      {"reward": {"dist": "bernoulli", "p": 0.2}, "cost": {"dist": "point", "value": 1.0}}]},
    "budgets": [50, 100, 200, 400], "replications": 4, "base_seed": 3})";

  const auto prefix = (box.dir() / "res" / "e").string();
  auto r = box.run("run --config \"" + cfg.string() + "\" --out \"" + prefix + "\" --threads 2");
  REQUIRE(r.code == 0);
  const auto rows = bwk::read_summary_csv(fs::path(prefix + "_summary.csv"));
  CHECK(rows.size() == 8);
  CHECK(fs::exists(prefix + "_config.json"));

  r = box.run("slope \"" + prefix + "_summary.csv\" --policy UNIFORM");
  CHECK(r.code == 0);
  const double slope = std::stod(r.out);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.1));

  r = box.run("slope \"" + prefix + "_summary.csv\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("EXP3_BWK ") != std::string::npos);
  CHECK(r.out.find("UNIFORM ") != std::string::npos);

  r = box.run("run --config \"" + cfg.string() + "\" --out \"" + prefix + "2\" --emit-traces");
  CHECK(r.code == 0);
  std::size_t traces = 0;
  for (const auto& e : fs::directory_iterator(box.dir() / "res"))
    if (e.path().filename().string().rfind("e2_trace_", 0) == 0) ++traces;
  CHECK(traces == 32);
  CHECK(slurp(prefix + "_summary.csv") == slurp(prefix + "2_summary.csv"));
}

TEST_CASE("cli gen-env") {
  Sandbox box;
  const auto m5 = box.dir() / "t5.csv";
  auto r = box.run("gen-env thm5 --alpha 0.5 --B 100 --optimal-arm 1 --out \"" + m5.string() + "\"");
  REQUIRE(r.code == 0);
  const auto table = bwk::read_matrix_csv(m5);
  CHECK(table.num_arms == 2);
  CHECK(table.max_cost() == doctest::Approx(10.0));

  const auto m2 = box.dir() / "t2.csv";
  r = box.run("gen-env thm2 --K 3 --B 300 --c-min 0.5 --seed 9 --realize --out \"" + m2.string() + "\"");
  REQUIRE(r.code == 0);
  CHECK(bwk::read_matrix_csv(m2).num_arms == 3);

  const auto j2 = box.dir() / "t2.json";
  r = box.run("gen-env thm2 --K 3 --B 300 --c-min 0.5 --out \"" + j2.string() + "\"");
  CHECK(r.code == 0);
  CHECK(slurp(j2).find("\"arms\"") != std::string::npos);

  // The generated matrix drives a run.
  const auto cfg = box.dir() / "m.json";
  std::ofstream(cfg) << R"({"policy": {"type": "exp3_bwk"},
    "environment": {"type": "matrix_file", "path": "t5.csv", "c_min": 1, "c_max": 10},
    "budgets": [100], "replications": 2})";
  r = box.run("run --config \"" + cfg.string() + "\" --out \"" + (box.dir() / "m").string() + "\"");
  CHECK(r.code == 0);
}

TEST_CASE("cli errors") {
  Sandbox box;
  auto r = box.run("run --config \"" + (box.dir() / "missing.json").string() + "\" --out x");
  CHECK(r.code != 0);
  CHECK(r.err.rfind("error: ", 0) == 0);

  const auto bad = box.dir() / "bad.json";
  std::ofstream(bad) << R"({"policy": {"type": "uniform"}, "budgets": [1], "oops": 1})";
  r = box.run("run --config \"" + bad.string() + "\" --out x");
  CHECK(r.code != 0);
  CHECK(r.err.find("oops") != std::string::npos);

  r = box.run("gen-env thm2 --K 2 --B 1 --c-min 0.5 --out \"" + (box.dir() / "t.json").string() + "\"");
  CHECK(r.code != 0);

  r = box.run("frobnicate");
  CHECK(r.code != 0);

  const auto two = box.dir() / "two.csv";
  std::ofstream(two) << bwk::kSummaryHeader << "\nU,10,1,1,0,1,1\nU,20,1,2,0,1,1\n";
  r = box.run("slope \"" + two.string() + "\"");
  CHECK(r.code != 0);
}
