#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ilsq/problem_io.hpp"
#include "support.hpp"

using namespace ilsq;

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_identical(const LsqProblem &a, const LsqProblem &b) {
  CHECK(a.name == b.name);
  CHECK(a.a == b.a);
  CHECK(a.b == b.b);
}

void check_error_at(const std::string &text, int line, int column, const std::string &what) {
  try {
    parse_problem(text);
    FAIL("expected a parse error");
  } catch (const ParseError &e) {
    CHECK(e.line() == line);
    CHECK(e.column() == column);
    CHECK(std::string(e.what()).find(what) != std::string::npos);
  }
}

} // namespace

TEST_CASE("round trip is bit exact") {
  for (const auto &family : problem_families()) {
    const auto p = named_problem(family);
    check_identical(parse_problem(format_problem(p)), p);
  }
  test::Random rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    ToftParams t;
    t.n = rng.integer(2, 8);
    t.extra_rows = rng.integer(0, static_cast<int>(t.n));
    t.r = rng.uniform(0, 0.3);
    t.s = rng.uniform(0, 0.3);
    t.theta = rng.uniform(1, 5);
    t.big_r = rng.uniform(0, 0.5);
    const auto p = gen_toft(t);
    check_identical(parse_problem(format_problem(p)), p);
  }
}

TEST_CASE("number formatting") {
  CHECK(format_number(-13) == "-13");
  CHECK(format_number(0.1) == "0.10000000000000001");
  test::Random rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.integer(-30, 30));
    CHECK(std::stod(format_number(v)) == v);
  }
}

TEST_CASE("golden fixtures match the generators byte for byte") {
  CHECK(slurp(test::fixture("sample_ils.json")) == format_problem(named_problem("example5")));
  CHECK(slurp(test::fixture("example1.json")) == format_problem(named_problem("example1")));
  CHECK(slurp(test::fixture("gay.json")) == format_problem(named_problem("example2")));
  CHECK(slurp(test::fixture("bentbib.json")) == format_problem(named_problem("example3")));
  CHECK(slurp(test::fixture("rohn.json")) == format_problem(named_problem("rohn")));
  CHECK(slurp(test::fixture("example4.json")) == format_problem(named_problem("example4")));
  CHECK(slurp(test::fixture("toft.json")) == format_problem(gen_toft({})));
}

TEST_CASE("bare numbers are degenerate intervals") {
  const auto p = read_problem(test::fixture("point.json"));
  CHECK(p.name == "point");
  CHECK(p.rows() == 3);
  CHECK(is_degenerate(p.a));
  CHECK(p.b(2) == IntervalD(4));

  const auto q = parse_problem(R"({"m": 1, "n": 1, "A": [[2]], "b": [[1, 3]]})");
  CHECK(q.name.empty());
  CHECK(q.b(0) == IntervalD(1, 3));
}

TEST_CASE("diagnostics carry line and column") {
  check_error_at(slurp(test::fixture("bad_interval.json")), 7, 6, "lower endpoint exceeds");
  check_error_at("{\"m\": 2,\n \"n\": x}", 2, 7, "syntax error");
  check_error_at("{\"m\": 1, \"n\": 1,\n \"A\": [[1]],\n \"b\": [1, 2]}", 3, 7, "array of 1");
  check_error_at("{\"m\": 2, \"n\": 1,\n \"A\": [[1], [1, 2]],\n \"b\": [1, 2]}", 2, 13,
                 "row must have 1");
  check_error_at("{\"m\": 1, \"n\": 1, \"A\": [[\"x\"]], \"b\": [1]}", 1, 25, "expected a number");
  check_error_at("{\"m\": 1, \"n\": 2, \"A\": [[1, 2]], \"b\": [1]}", 1, 7, "need m >= n");
  check_error_at("{\"m\": 0, \"n\": 1}", 1, 7, "positive integer");
  CHECK_THROWS_AS(parse_problem("[1, 2]"), ParseError);
  CHECK_THROWS_AS(parse_problem(R"({"n": 1, "A": [], "b": []})"), ParseError);
  CHECK_THROWS_AS(read_problem("/nonexistent/problem.json"), ParseError);
}

TEST_CASE("CSV output") {
  std::vector<RealVector> pts{RealVector::Constant(2, 0.5), RealVector::Constant(2, -1.0)};
  std::ostringstream os;
  write_csv(os, pts);
  CHECK(os.str() == "x1,x2\n0.5,0.5\n-1,-1\n");
}

TEST_CASE("report schema") {
  const auto p = named_problem("example5");
  IlsqOptions o;
  o.components = {0};
  const auto rep = ilsq_pps(p, o);
  const auto j = nlohmann::json::parse(report_json(rep, {p.name, o.solve, o.bounds, 7}));
  CHECK(j["problem"] == "example5");
  CHECK(j["seed"] == 7);
  CHECK(j["converged"] == true);
  CHECK(j["rank"]["spectral_value"].get<double>() == doctest::Approx(0.3636).epsilon(1e-3));
  CHECK(j["rank"]["ratio"].get<double>() == doctest::Approx(2.708).epsilon(1e-3));
  REQUIRE(j["components"].size() == 1);
  const auto &c = j["components"][0];
  CHECK(c["component"] == 1);
  for (const char *key : {"lo", "hi", "gap", "iterations", "time_ms", "converged", "lower", "upper"})
    CHECK(c.contains(key));
  CHECK(std::abs(c["lo"].get<double>() + 0.1460) < 1e-3);
  CHECK(c["lower"]["iterations"].get<long>() >= 0);
  CHECK(j["box"].size() == 2);

  const auto r = nlohmann::json::parse(rank_json(*rep.rank));
  CHECK(r["certified"] == true);
}
