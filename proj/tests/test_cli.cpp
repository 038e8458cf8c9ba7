// End-to-end tests of the command-line tool. The binary path is passed
// as the last command-line argument by CTest.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinchain/model_io.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_cli;
fs::path g_dir;

int run(const std::string& args) {
  std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

json summary(const std::string& dir, const std::string& command) {
  return json::parse(slurp(fs::path(dir) / (command + "_summary.json")));
}

std::string write_model(const std::string& name, const json& j) {
  fs::path p = g_dir / name;
  std::ofstream(p) << j.dump(2);
  return p.string();
}

std::string out_dir(const std::string& name) {
  fs::path p = g_dir / name;
  fs::create_directories(p);
  return p.string();
}

json hmm_model() {
  return json{
      {"kind", "hidden_markov"},
      {"d_A", 2},
      {"T", {{0.9, 0.1}, {0.2, 0.8}}},
      {"theta",
       {{{{1.0, 0.0}, {0.0, 0.0}}, {{1.0, 0.0}, {0.0, 0.0}}},
        {{{0.0, 0.0}, {0.0, 1.0}}, {{0.0, 0.0}, {0.0, 1.0}}}}},
  };
}

json product_model(double p) {
  return json{{"kind", "product"},
              {"phi1", {{1.0 - p, 0.0}, {0.0, p}}}};
}

json ising_model() {
  return json{{"kind", "interaction"},
              {"d_A", 2},
              {"range", 1},
              {"window_terms",
               {json::parse("[[0.5,0],[0,-0.5]]"),
                json::parse("[[1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,1]]")}}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("validate: good model exits 0, broken model exits 2") {
  std::string good = write_model("good.json", hmm_model());
  std::string dir = out_dir("validate_good");
  CHECK(run("validate --model " + good + " --output " + dir) == 0);
  json s = summary(dir, "validate");
  CHECK(s["valid"].get<bool>());
  CHECK(s["invariance_residual"].get<double>() < 1e-9);

  json bad = hmm_model();
  bad["T"] = {{0.8, 0.1}, {0.2, 0.8}};
  std::string bad_path = write_model("bad.json", bad);
  CHECK(run("validate --model " + bad_path) == 2);
  CHECK(run("validate --model /nonexistent.json") == 2);
}

TEST_CASE("ergodicity reports a mixing chain") {
  std::string model = write_model("erg.json", hmm_model());
  std::string dir = out_dir("erg");
  CHECK(run("ergodicity --model " + model + " --output " + dir) == 0);
  json s = summary(dir, "ergodicity");
  CHECK(s["ergodic"].get<bool>());
  CHECK(s["strongly_mixing"].get<bool>());
}

TEST_CASE("cap violations exit with status 3") {
  std::string model = write_model("cap.json", hmm_model());
  std::string cmd = "SPINCHAIN_CAP=4 " + g_cli + " density --model " + model +
                    " -n 4 > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
  // Within the cap the same command succeeds.
  std::string dir = out_dir("cap_ok");
  CHECK(run("density --model " + model + " -n 4 --output " + dir) == 0);
  json s = summary(dir, "density");
  CHECK(s["trace"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("rate-function emits the t,F,x,I table") {
  std::string model = write_model("prod.json", product_model(0.3));
  std::string dir = out_dir("rate");
  CHECK(run("rate-function --model " + model +
            " --t-range -3 3 --t-steps 5 --x-steps 11 --output " + dir) == 0);
  json s = summary(dir, "rate-function");
  CHECK(s["mean"].get<double>() == doctest::Approx(0.3).epsilon(1e-5));
  CHECK(s["rate_at_mean"].get<double>() <= 1e-8);

  auto rows = read_csv(fs::path(dir) / "rate-function.csv");
  REQUIRE(rows.size() == 12);  // header + 11 x-rows
  CHECK(rows[0] == std::vector<std::string>{"t", "F", "x", "I"});
  // x column spans the spectrum of the observable.
  CHECK(std::stod(rows[1][2]) == doctest::Approx(0.0));
  CHECK(std::stod(rows[11][2]) == doctest::Approx(1.0));
}

TEST_CASE("chernoff rows satisfy the sandwich inequality") {
  std::string a = write_model("ca.json", product_model(0.8));
  std::string b = write_model("cb.json", product_model(0.3));
  std::string dir = out_dir("chernoff");
  CHECK(run("chernoff --model-a " + a + " --model-b " + b +
            " --t-range 0.1 0.9 --t-steps 5 --n-max 3 --alpha 1 --output " +
            dir) == 0);
  auto rows = read_csv(fs::path(dir) / "chernoff.csv");
  REQUIRE(rows.size() == 6);
  size_t xi3 = 3, upper = 4, lower = 5;
  CHECK(rows[0][upper] == "upper_env");
  for (size_t i = 1; i < rows.size(); ++i) {
    double x = std::stod(rows[i][xi3]);
    CHECK(std::stod(rows[i][lower]) <= x + 1e-9);
    CHECK(x <= std::stod(rows[i][upper]) + 1e-9);
  }
}

TEST_CASE("pmin and factorization commands succeed") {
  std::string a = write_model("pa.json", product_model(0.9));
  std::string b = write_model("pb.json", product_model(0.2));
  std::string dir = out_dir("pmin");
  CHECK(run("pmin --model-a " + a + " --model-b " + b +
            " --n-max 3 --kappa 0.5 --output " + dir) == 0);
  auto rows = read_csv(fs::path(dir) / "pmin.csv");
  REQUIRE(rows.size() == 4);
  // Error probabilities decrease with n for these distinguishable states.
  CHECK(std::stod(rows[3][1]) < std::stod(rows[1][1]));

  std::string model = write_model("fact.json", hmm_model());
  std::string fdir = out_dir("fact");
  CHECK(run("factorization --model " + model + " -m 2 -k 2 --output " +
            fdir) == 0);
  json s = summary(fdir, "factorization");
  CHECK(s["beta_star"].get<double>() >= 1.0 - 1e-9);
  CHECK(s["certificate_psd_ok"].get<bool>());
  CHECK(s["markov_tp"].get<bool>());
}

TEST_CASE("pressure and gibbs-bound commands succeed") {
  std::string state = write_model("ps.json", hmm_model());
  std::string inter = write_model("pi.json", ising_model());
  std::string dir = out_dir("pressure");
  CHECK(run("pressure --model-a " + state + " --model-b " + inter +
            " -t 0.5 --n-max 4 -m 4 --output " + dir) == 0);
  json s = summary(dir, "pressure");
  CHECK(s["bound_satisfied"].get<bool>());

  std::string dir2 = out_dir("pressure_tracial");
  CHECK(run("pressure --model " + inter + " -t 0.5 --n-max 4 --output " +
            dir2) == 0);

  json inter2 = ising_model();
  inter2["window_terms"][0] = json::parse("[[0.2,0],[0,-0.2]]");
  std::string other = write_model("pi2.json", inter2);
  std::string dir3 = out_dir("gibbs");
  CHECK(run("gibbs-bound --model-a " + inter + " --model-b " + other +
            " -t 0.5 --n-max 3 --output " + dir3) == 0);
  json g = summary(dir3, "gibbs-bound");
  CHECK(g["golden_thompson_ok"].get<bool>());
}

TEST_CASE("identical inputs produce bit-identical CSV output") {
  std::string model = write_model("repro.json", hmm_model());
  std::string d1 = out_dir("repro1"), d2 = out_dir("repro2");
  std::string args = "mgf --model " + model +
                     " --t-range -2 2 --t-steps 9 --n-max 6 --output ";
  CHECK(run(args + d1) == 0);
  CHECK(run(args + d2) == 0);
  CHECK(slurp(fs::path(d1) / "mgf.csv") == slurp(fs::path(d2) / "mgf.csv"));
  CHECK_FALSE(slurp(fs::path(d1) / "mgf.csv").empty());
}

TEST_CASE("json format inlines the table") {
  std::string model = write_model("fmt.json", hmm_model());
  std::string dir = out_dir("fmt");
  CHECK(run("density --model " + model + " -n 2 --format json --output " +
            dir) == 0);
  CHECK_FALSE(fs::exists(fs::path(dir) / "density.csv"));
  json s = summary(dir, "density");
  CHECK(s.contains("table"));
  CHECK(s["table"]["columns"].size() == 4);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary>\n");
    return 1;
  }
  g_cli = argv[argc - 1];
  g_dir = fs::temp_directory_path() / "spinchain_cli_test";
  fs::remove_all(g_dir);
  fs::create_directories(g_dir);

  doctest::Context ctx;
  ctx.applyCommandLine(argc - 1, argv);
  int rc = ctx.run();
  fs::remove_all(g_dir);
  return rc;
}
