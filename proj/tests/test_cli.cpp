#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ilsq/problem_io.hpp"
#include "support.hpp"

using namespace ilsq;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

std::filesystem::path scratch(const std::string &name) {
  const auto dir = std::filesystem::temp_directory_path() / "ilsq_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string &args) {
  const auto out = scratch("stdout.txt");
  const std::string cmd = std::string(ILSQ_CLI_PATH) + " " + args + " > " + out.string() + " 2> " +
                          scratch("stderr.txt").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out)};
}

std::string fx(const char *name) { return test::fixture(name).string(); }

std::vector<std::vector<double>> read_csv(const std::filesystem::path &p, std::string &header) {
  std::ifstream in(p);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');)
      row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

void check_box(const json &report, const double (&box)[2][2], double tol) {
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(std::abs(report["box"][j][0].get<double>() - box[j][0]) < tol);
    CHECK(std::abs(report["box"][j][1].get<double>() - box[j][1]) < tol);
  }
}

} // namespace

TEST_CASE("solve reproduces the Example 5 and Gay boxes") {
  auto r = run("solve " + fx("sample_ils.json") + " --json");
  REQUIRE(r.code == 0);
  const double ex5[2][2] = {{-0.1460, 0.2222}, {-0.2222, 0.1998}};
  check_box(json::parse(r.out), ex5, 1e-3);

  r = run("solve " + fx("gay.json") + " --json");
  REQUIRE(r.code == 0);
  const double gay[2][2] = {{0.5056, 0.7118}, {0.3363, 1.6503}};
  check_box(json::parse(r.out), gay, 1e-3);
}

TEST_CASE("solve of a point system") {
  const auto r = run("solve " + fx("point.json") + " --json");
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  for (const auto &c : j["components"]) {
    CHECK(c["iterations"] == 0);
    CHECK(c["hi"].get<double>() - c["lo"].get<double>() < 1e-15);
  }
  const auto text = run("solve " + fx("point.json"));
  CHECK(text.out.find("x2") != std::string::npos);
}

TEST_CASE("solve flags") {
  auto r = run("solve " + fx("sample_ils.json") +
               " --json --component 2 --bound min --method simple --encl gauss --eps 1e-5"
               " --clean-period 0 --rhs-split halves --no-squeeze");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j["components"].size() == 1);
  CHECK(j["components"][0]["component"] == 2);
  CHECK(j["components"][0]["upper"].is_null());
  CHECK(std::abs(j["components"][0]["lo"].get<double>() + 0.2222) < 1e-3);
  CHECK(j["options"]["method"] == "simple");
  CHECK(j["options"]["encl"] == "gauss");

  r = run("solve " + fx("sample_ils.json") + " --json --component 2,1 --bound max");
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  REQUIRE(j["components"].size() == 2);
  CHECK(j["components"][0]["component"] == 2);
  CHECK(j["components"][1]["component"] == 1);

  CHECK(run("solve " + fx("sample_ils.json") + " --component 3").code == 1);
  CHECK(run("solve " + fx("sample_ils.json") + " --component 1,x").code == 1);
  CHECK(run("solve " + fx("sample_ils.json") + " --component ,").code == 1);
  CHECK(run("solve " + fx("sample_ils.json") + " --method fancy").code != 0);
}

TEST_CASE("exit codes") {
  CHECK(run("solve " + fx("bad_interval.json")).code == 2);
  CHECK(run("solve /nonexistent.json").code == 2);
  auto r = run("solve " + fx("rank_fail.json"));
  CHECK(r.code == 3);
  CHECK(r.out.find("fails") != std::string::npos);
  CHECK(run("rank " + fx("rank_fail.json")).code == 3);
  CHECK(run("solve " + fx("rank_fail.json") + " --no-rank-check").code == 1);

  r = run("solve " + fx("sample_ils.json") + " --max-iters 2");
  CHECK(r.code == 4);
  CHECK(r.out.find("not converged") != std::string::npos);
  r = run("solve " + fx("sample_ils.json") + " --max-iters 2 --json");
  CHECK(r.code == 4);
  const auto j = json::parse(r.out);
  CHECK(j["converged"] == false);
  CHECK(j["box"][0][0].get<double>() <= -0.14604);
  CHECK(j["box"][1][1].get<double>() >= 0.19979);
}

TEST_CASE("rank reports") {
  auto r = run("rank " + fx("sample_ils.json") + " --json");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(std::abs(j["spectral_value"].get<double>() - 0.3636) < 1e-3);
  CHECK(std::abs(j["ratio"].get<double>() - 2.7080) < 1e-3);

  r = run("rank " + fx("point.json") + " --json");
  j = json::parse(r.out);
  CHECK(j["spectral_value"] == 0.0);
  CHECK(j["certified"] == true);

  r = run("rank " + fx("toft.json") + " --json");
  j = json::parse(r.out);
  CHECK(std::abs(j["spectral_value"].get<double>() - 0.1964) < 1e-3);
  CHECK(run("rank " + fx("toft.json")).out.find("spectral value 0.19647") != std::string::npos);
}

TEST_CASE("sample emits CSV inside the solved box") {
  const auto csv = scratch("ex5.csv");
  REQUIRE(run("sample " + fx("sample_ils.json") + " --count 10000 --seed 3 --out " + csv.string())
              .code == 0);
  std::string header;
  const auto rows = read_csv(csv, header);
  CHECK(header == "x1,x2");
  REQUIRE(rows.size() == 10000);
  const auto box = json::parse(run("solve " + fx("sample_ils.json") + " --json").out)["box"];
  for (const auto &row : rows)
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(row[j] >= box[j][0].get<double>());
      CHECK(row[j] <= box[j][1].get<double>());
    }

  const auto one = run("sample " + fx("sample_ils.json") + " --count 1 --seed 11");
  CHECK(one.out == run("sample " + fx("sample_ils.json") + " --count 1 --seed 11").out);
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 2);
  CHECK(slurp(scratch("stderr.txt")).find("seed: 11") != std::string::npos);
}

TEST_CASE("Example 1 samples lie on the analytic curve") {
  const auto csv = scratch("ex1.csv");
  REQUIRE(run("sample " + fx("example1.json") + " --count 500 --out " + csv.string()).code == 0);
  std::string header;
  for (const auto &row : read_csv(csv, header)) {
    // x1 = (250t - 20)/d(t) and x2 = (-60t^2 + 50t - 220)/d(t): eliminate t
    // by testing every root of the x1 equation.
    const double x1 = row[0];
    const double qa = 13 * x1, qb = 36 * x1 - 250, qc = 89 * x1 + 20;
    const double disc = std::max(qb * qb - 4 * qa * qc, 0.0);
    bool on_curve = false;
    for (const double t : {(-qb - std::sqrt(disc)) / (2 * qa), (-qb + std::sqrt(disc)) / (2 * qa)}) {
      const double d = 13 * t * t + 36 * t + 89;
      if (t > -1e-9 && t < 10 + 1e-9 && std::abs(row[1] - (-60 * t * t + 50 * t - 220) / d) < 1e-8)
        on_curve = true;
    }
    CHECK(on_curve);
  }
}

TEST_CASE("gen writes the benchmark files") {
  auto r = run("gen --family toft");
  REQUIRE(r.code == 0);
  CHECK(r.out == slurp(test::fixture("toft.json")));
  const auto toft = parse_problem(r.out);
  CHECK(toft.rows() == 15);
  CHECK(toft.cols() == 12);

  r = run("gen --family example5");
  CHECK(r.out == slurp(test::fixture("sample_ils.json")));
  CHECK(r.out == run("gen --family example5").out);

  r = run("gen --family toft --r 0 --s 0 --R 0 --n 5 --extra-rows 2 --theta 3");
  REQUIRE(r.code == 0);
  const auto d = parse_problem(r.out);
  CHECK(d.rows() == 7);
  CHECK(is_degenerate(d.a));
  CHECK(is_degenerate(d.b));

  const auto file = scratch("gen.json");
  REQUIRE(run("gen --family example1 --out " + file.string()).code == 0);
  CHECK(slurp(file) == slurp(test::fixture("example1.json")));
  CHECK(run("gen --family nope").code != 0);
}

TEST_CASE("oracle compares inner and outer hulls") {
  auto r = run("oracle " + fx("example1.json") + " --grid 20001 --json");
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["contained"] == true);
  CHECK(j["seed"] == 1);
  for (const auto &c : j["components"]) {
    CHECK(c["gap_lo"].get<double>() < 1e-3);
    CHECK(c["gap_hi"].get<double>() < 1e-3);
  }

  r = run("oracle " + fx("point.json") + " --json");
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  for (const auto &c : j["components"]) {
    CHECK(test::ulp_distance(c["inner"][0].get<double>(), c["outer"][0].get<double>()) <= 4);
    CHECK(test::ulp_distance(c["inner"][1].get<double>(), c["outer"][1].get<double>()) <= 4);
  }

  // 64 grid points per pair of matrix parameters, i.e. 8 per parameter.
  r = run("oracle " + fx("sample_ils.json") + " --grid 8 --json");
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["contained"] == true);
  CHECK(j["grid"] == 8);
  for (const auto &c : j["components"]) {
    CHECK(c["gap_lo"].get<double>() < 5e-3);
    CHECK(c["gap_hi"].get<double>() < 5e-3);
  }
  CHECK(run("oracle " + fx("sample_ils.json") + " --grid 8").out.find("contained") !=
        std::string::npos);

  r = run("oracle " + fx("example4.json") + " --grid 200 --count 0 --json");
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["samples"] == 0);
  CHECK(j["contained"] == true);
  for (const auto &c : j["components"]) {
    CHECK(c["gap_lo"].get<double>() < 2e-3);
    CHECK(c["gap_hi"].get<double>() < 2e-3);
  }
  CHECK(run("oracle " + fx("toft.json") + " --count 0").code == 1);
}
