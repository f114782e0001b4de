#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "freestein_cli_test";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = std::string(FREESTEIN_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("derive") {
  Run r = run("derive --what cyclic-gradient --nvars 2");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["entries"][0]["terms"][0]["word"] == json::array({1}));
  CHECK(j["entries"][1]["terms"][0]["word"] == json::array({2}));

  r = run("derive --what jacobian --tuple coordinates --nvars 3");
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const json& terms = j["entries"][a][b]["terms"];
      CHECK(terms.size() == (a == b ? 1u : 0u));
    }
  }

  r = run("derive --what explicit-kernel");
  REQUIRE(r.code == 0);
  const json kernel = json::parse(r.out);
  const json& terms = kernel["entries"][0][0]["terms"];
  REQUIRE(terms.size() == 3);
  CHECK(terms[0]["left"].empty());
  CHECK(terms[0]["re_num"] == 1);
  CHECK(terms[0]["re_den"] == 2);
  CHECK(terms[1]["re_num"] == -1);

  const fs::path p = write("p.json", R"({"nvars": 2, "terms": [{"word": [1, 2, 1], "re_num": 1}]})");
  r = run("derive --what partial --index 2 --potential " + p.string());
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["terms"].size() == 1);

  r = run("derive --what partial --index 3 --potential " + p.string());
  CHECK(r.code == 1);
  CHECK(json::parse(r.err)["error"]["field"] == "--index");
}

TEST_CASE("stein") {
  Run r = run("stein --cumulants semicircular --nvars 2 --degree 2");
  REQUIRE(r.code == 0);
  CHECK(std::abs(json::parse(r.out)["sigma_lower_sq"].get<double>()) < 1e-8);

  r = run("stein --cumulants free-poisson --degree 3");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["upper_explicit_sq"].get<double>() == doctest::Approx(2.0));
  CHECK(j["sigma_lower_sq"].get<double>() == doctest::Approx(0.5));
  CHECK(j["violations"].empty());

  const fs::path cubic = write("cubic.json", R"({"nvars": 1, "terms": [{"word": [1, 1, 1], "re_num": 1}]})");
  r = run("stein --cumulants free-poisson --potential " + cubic.string());
  CHECK(r.code == 2);
  const json err = json::parse(r.err)["error"];
  CHECK(err["code"] == "inadmissible");
  CHECK(err["message"].get<std::string>().find("centering defect") != std::string::npos);
}

TEST_CASE("state validation and budgets map to exit codes") {
  const fs::path bad = write("bad.json", R"({"nvars": 1, "max_order": 2, "tracial": true,
    "entries": [{"word": [1], "re": 0}, {"word": [1, 1], "re": -1}]})");
  Run r = run("poincare --state " + bad.string() + " --degree 1");
  CHECK(r.code == 3);
  CHECK(json::parse(r.err)["error"]["code"] == "invalid_state");

  const fs::path small = write("small.json", R"({"nvars": 1, "max_order": 2, "tracial": true,
    "entries": [{"word": [1], "re": 0}, {"word": [1, 1], "re": 1}]})");
  r = run("stein --state " + small.string() + " --degree 3");
  CHECK(r.code == 4);
  CHECK(json::parse(r.err)["error"]["code"] == "budget_exceeded");

  r = run("poincare --state /nonexistent.json");
  CHECK(r.code == 1);
  r = run("stein");
  CHECK(r.code == 1);
  r = run("stein --cumulants free-poisson --tol-psd -1");
  CHECK(r.code == 1);
}

TEST_CASE("poincare") {
  const Run r = run("poincare --cumulants semicircular --degree 3");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["c_lower"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(j["voiculescu_certified"].get<bool>());
}

TEST_CASE("clt") {
  const Run r = run("clt --ks 1,2,4,8");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "k,m4_Yk,sigma_d_lower,theorem_constant,bound_over_sqrt_k,ratio");
  double previous = 1e300;
  int rows = 0;
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (int c = 0; c < 3; ++c) std::getline(cells, cell, ',');
    const double sigma = std::stod(cell);
    CHECK(sigma <= previous + 1e-12);
    previous = sigma;
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("mc is byte-identical for a fixed seed") {
  const fs::path cfg = write("gue.json", R"({"N": 100, "samples": 100, "seed": 7, "generators": [{"kind": "gue"}]})");
  const fs::path a = scratch() / "a.json";
  const fs::path b = scratch() / "b.json";
  REQUIRE(run("mc --ensemble " + cfg.string() + " --max-order 4 --out " + a.string()).code == 0);
  REQUIRE(run("mc --ensemble " + cfg.string() + " --max-order 4 --threads 1 --out " + b.string()).code == 0);
  CHECK(slurp(a) == slurp(b));
  const json table = json::parse(slurp(a));
  CHECK(table["max_order"] == 4);
  CHECK(table["entries"].size() == 5);

  const fs::path c = scratch() / "c.json";
  REQUIRE(run("mc --ensemble " + cfg.string() + " --max-order 4 --seed 8 --out " + c.string()).code == 0);
  CHECK(slurp(a) != slurp(c));

  const Run r = run("stein --state " + a.string() + " --degree 1");
  CHECK(r.code == 2);
}
