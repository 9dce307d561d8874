// ilsq: command-line front end for the interval least squares solver.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ilsq/augment.hpp"
#include "ilsq/pps.hpp"
#include "ilsq/problem_io.hpp"
#include "ilsq/rank_check.hpp"

namespace {

using namespace ilsq;

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kParse = 2,
  kRank = 3,
  kLimit = 4,
};

struct SolveArgs {
  std::string file;
  double eps = 1e-6;
  std::string method = "modified";
  std::string encl = "krawczyk";
  std::string component = "all";
  std::string bound = "both";
  long max_iters = 10'000'000;
  double time_limit = std::numeric_limits<double>::infinity();
  int clean_period = 8;
  std::string rhs_split = "endpoints";
  bool no_squeeze = false;
  bool no_rank_check = false;
  bool json = false;
};

struct SampleArgs {
  std::string file;
  std::size_t count = 1000;
  std::uint64_t seed = 1;
  std::string out = "-";
};

struct GenArgs {
  std::string family;
  ToftParams toft;
  std::string out = "-";
};

struct OracleArgs {
  std::string file;
  int grid = 64;
  std::uint64_t seed = 1;
  std::size_t count = 10000;
  bool polish = false;
  double eps = 1e-6;
  double tol = 1e-10;
  bool json = false;
};

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

void print_rank(std::ostream &os, const RankReport &r) {
  os << "rank: spectral value " << fmt(r.spectral_value) << (r.spectral_holds ? " (holds)" : " (fails)")
     << ", sigma ratio " << fmt(r.ratio) << (r.sigma_holds ? " (holds)" : " (fails)") << "\n";
}

IlsqOptions solve_options(const SolveArgs &a, Index n) {
  IlsqOptions o;
  o.solve.eps = a.eps;
  o.solve.method = a.method == "simple" ? PpsMethod::simple : PpsMethod::modified;
  o.solve.encl.kind = a.encl == "gauss" ? EnclosureKind::interval_gauss : EnclosureKind::krawczyk;
  o.solve.max_iters = a.max_iters;
  o.solve.time_limit = a.time_limit;
  o.solve.clean_period = a.clean_period;
  o.solve.squeeze = !a.no_squeeze;
  o.solve.rhs_split = a.rhs_split == "halves" ? RhsSplit::halves : RhsSplit::endpoints;
  o.bounds = a.bound == "min" ? BoundSide::min : a.bound == "max" ? BoundSide::max : BoundSide::both;
  o.skip_rank_check = a.no_rank_check;
  if (a.component != "all") {
    std::stringstream list(a.component);
    for (std::string item; std::getline(list, item, ',');) {
      std::size_t used = 0;
      long k = 0;
      try {
        k = std::stol(item, &used);
      } catch (const std::exception &) {
        used = 0;
      }
      if (item.empty() || used != item.size() || k < 1 || k > n)
        throw std::invalid_argument("--component must be 'all' or indices in 1.." +
                                    std::to_string(n));
      o.components.push_back(static_cast<Index>(k - 1));
    }
    if (o.components.empty())
      throw std::invalid_argument("--component is empty");
  }
  return o;
}

void print_report(std::ostream &os, const LsqProblem &p, const IlsqReport &r) {
  os << "problem: " << (p.name.empty() ? "(unnamed)" : p.name) << " (" << p.rows() << " x "
     << p.cols() << ")\n";
  if (r.rank)
    print_rank(os, *r.rank);
  os << std::left << std::setw(6) << "comp" << std::setw(24) << "lower" << std::setw(24) << "upper"
     << std::setw(12) << "gap" << std::setw(12) << "iterations" << "time_ms\n";
  for (const auto &c : r.components) {
    double gap = 0, ms = 0;
    long iters = 0;
    bool converged = true;
    for (const auto *side : {&c.lower, &c.upper})
      if (*side) {
        gap = std::max(gap, (*side)->stats.gap);
        ms += (*side)->stats.wall_ms;
        iters += (*side)->stats.iterations;
        converged = converged && (*side)->stats.converged;
      }
    os << std::left << std::setw(6) << ("x" + std::to_string(c.component + 1)) << std::setw(24)
       << fmt(r.box(c.component).lo(), 12) << std::setw(24) << fmt(r.box(c.component).hi(), 12)
       << std::setw(12) << fmt(gap, 3) << std::setw(12) << iters << fmt(ms, 4)
       << (converged ? "" : "  not converged") << "\n";
  }
}

int cmd_solve(const SolveArgs &a) {
  const LsqProblem p = read_problem(a.file);
  const IlsqOptions opts = solve_options(a, p.cols());
  IlsqReport report;
  try {
    report = ilsq_pps(p, opts);
  } catch (const RankCertificationFailure &e) {
    if (a.json)
      std::cout << rank_json(e.report()) << "\n";
    else
      print_rank(std::cout, e.report());
    std::cerr << "ilsq: " << e.what() << " (use --no-rank-check to override)\n";
    return kRank;
  }
  if (a.json)
    std::cout << report_json(report, {p.name, opts.solve, opts.bounds, std::nullopt}) << "\n";
  else
    print_report(std::cout, p, report);
  return report.converged() ? kOk : kLimit;
}

int cmd_rank(const std::string &file, bool as_json) {
  const LsqProblem p = read_problem(file);
  const RankReport r = check_full_rank(p.a);
  if (as_json)
    std::cout << rank_json(r) << "\n";
  else
    print_rank(std::cout, r);
  return r.certified() ? kOk : kRank;
}

// Writes to the named file, or standard output for "-".
template <typename F> void emit(const std::string &out, F write) {
  if (out == "-") {
    write(std::cout);
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot write " + out);
  write(f);
}

int cmd_sample(const SampleArgs &a) {
  const LsqProblem p = read_problem(a.file);
  const auto points = sample_lsq(p, a.count, a.seed);
  emit(a.out, [&](std::ostream &os) { write_csv(os, points); });
  std::cerr << "seed: " << a.seed << "\n";
  return kOk;
}

int cmd_gen(const GenArgs &a) {
  const LsqProblem p = a.family == "toft" ? gen_toft(a.toft) : named_problem(a.family);
  emit(a.out, [&](std::ostream &os) { os << format_problem(p); });
  return kOk;
}

int cmd_oracle(const OracleArgs &a) {
  const LsqProblem p = read_problem(a.file);
  OracleOptions oo;
  oo.grid = a.grid;
  oo.polish = a.polish;
  std::optional<OracleResult> grid;
  try {
    grid = corner_lsq_hull(p, oo);
  } catch (const std::length_error &) {
  }
  const auto samples = sample_lsq(p, a.count, a.seed);
  if (samples.empty() && !grid)
    throw std::invalid_argument("oracle: too many parameters for the grid and no samples requested");
  IntervalVector inner = samples.empty() ? grid->hull : hull(samples);
  if (grid)
    for (Index j = 0; j < inner.size(); ++j)
      inner(j) = ilsq::hull(inner(j), grid->hull(j));

  IlsqOptions so;
  so.solve.eps = a.eps;
  const IlsqReport outer = ilsq_pps(p, so);

  // Oracle points are rounded floating-point solutions, so containment is
  // judged up to a relative tolerance.
  bool inside = true;
  for (Index j = 0; j < inner.size(); ++j) {
    const double slack = a.tol * (1 + mag(inner(j)));
    inside = inside && inner(j).lo() >= outer.box(j).lo() - slack &&
             inner(j).hi() <= outer.box(j).hi() + slack;
  }
  nlohmann::ordered_json o;
  o["problem"] = p.name;
  o["seed"] = a.seed;
  o["samples"] = a.count;
  o["grid"] = grid ? nlohmann::ordered_json(grid->grid_used) : nlohmann::ordered_json(nullptr);
  o["grid_points"] = grid ? grid->points : 0;
  nlohmann::ordered_json comps = nlohmann::ordered_json::array();
  for (Index j = 0; j < inner.size(); ++j)
    comps.push_back({{"component", j + 1},
                     {"inner", {inner(j).lo(), inner(j).hi()}},
                     {"outer", {outer.box(j).lo(), outer.box(j).hi()}},
                     {"gap_lo", inner(j).lo() - outer.box(j).lo()},
                     {"gap_hi", outer.box(j).hi() - inner(j).hi()}});
  o["components"] = std::move(comps);
  o["tolerance"] = a.tol;
  o["contained"] = inside;

  if (a.json) {
    std::cout << o.dump(2) << "\n";
  } else {
    std::cout << "problem: " << (p.name.empty() ? "(unnamed)" : p.name) << ", seed " << a.seed
              << ", " << a.count << " samples";
    if (grid)
      std::cout << ", grid " << grid->grid_used << " (" << grid->points << " points)";
    else
      std::cout << ", grid skipped (too many parameters)";
    std::cout << "\n";
    std::cout << std::left << std::setw(6) << "comp" << std::setw(40) << "inner hull"
              << std::setw(40) << "solver box" << "gaps\n";
    for (Index j = 0; j < inner.size(); ++j) {
      const std::string in = "[" + fmt(inner(j).lo(), 10) + ", " + fmt(inner(j).hi(), 10) + "]";
      const std::string out =
          "[" + fmt(outer.box(j).lo(), 10) + ", " + fmt(outer.box(j).hi(), 10) + "]";
      std::cout << std::setw(6) << ("x" + std::to_string(j + 1)) << std::setw(40) << in
                << std::setw(40) << out << fmt(inner(j).lo() - outer.box(j).lo(), 3) << " "
                << fmt(outer.box(j).hi() - inner(j).hi(), 3) << "\n";
    }
    std::cout << (inside ? "inner hull contained in solver box\n"
                         : "CONTAINMENT VIOLATED: inner hull escapes solver box\n");
  }
  return inside ? kOk : kFailure;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Guaranteed enclosures for interval linear least squares"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  SolveArgs solve;
  auto *s = app.add_subcommand("solve", "Enclose the least squares solution set");
  s->add_option("file", solve.file, "Problem file")->required();
  s->add_option("--eps", solve.eps, "Element width threshold")->check(CLI::PositiveNumber);
  s->add_option("--method", solve.method)->check(CLI::IsMember({"simple", "modified"}));
  s->add_option("--encl", solve.encl)->check(CLI::IsMember({"krawczyk", "gauss"}));
  s->add_option("--component", solve.component, "1-based component index, comma-separated list, or 'all'");
  s->add_option("--bound", solve.bound)->check(CLI::IsMember({"min", "max", "both"}));
  s->add_option("--max-iters", solve.max_iters, "Iteration limit per bound")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--time-limit", solve.time_limit, "Total time budget in seconds")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--clean-period", solve.clean_period, "Clean every M-th omega decrease; 0 never")
      ->check(CLI::NonNegativeNumber);
  s->add_option("--rhs-split", solve.rhs_split)->check(CLI::IsMember({"endpoints", "halves"}));
  s->add_flag("--no-squeeze", solve.no_squeeze, "Disable the monotonicity squeeze");
  s->add_flag("--no-rank-check", solve.no_rank_check, "Run even without a full rank certificate");
  s->add_flag("--json", solve.json, "Machine-readable report");

  std::string rank_file;
  bool rank_json_flag = false;
  auto *r = app.add_subcommand("rank", "Full column rank certificates");
  r->add_option("file", rank_file, "Problem file")->required();
  r->add_flag("--json", rank_json_flag);

  SampleArgs sample;
  auto *sm = app.add_subcommand("sample", "Monte Carlo least squares solutions as CSV");
  sm->add_option("file", sample.file, "Problem file")->required();
  sm->add_option("--count", sample.count)->check(CLI::PositiveNumber);
  sm->add_option("--seed", sample.seed);
  sm->add_option("--out", sample.out, "CSV file, '-' for standard output");

  GenArgs gen;
  auto *g = app.add_subcommand("gen", "Write a benchmark problem file");
  g->add_option("--family", gen.family)
      ->required()
      ->check(CLI::IsMember({"toft", "example1", "example2", "example3", "example4", "example5",
                             "rohn"}));
  g->add_option("--n", gen.toft.n)->check(CLI::Range(2, 1000));
  g->add_option("--extra-rows", gen.toft.extra_rows)->check(CLI::NonNegativeNumber);
  g->add_option("--r", gen.toft.r)->check(CLI::NonNegativeNumber);
  g->add_option("--s", gen.toft.s)->check(CLI::NonNegativeNumber);
  g->add_option("--theta", gen.toft.theta);
  g->add_option("--R", gen.toft.big_r)->check(CLI::NonNegativeNumber);
  g->add_option("--out", gen.out, "Output file, '-' for standard output");

  OracleArgs oracle;
  auto *o = app.add_subcommand("oracle", "Inner hull by brute force, compared with the solver");
  o->add_option("file", oracle.file, "Problem file")->required();
  o->add_option("--grid", oracle.grid, "Grid points per matrix parameter")->check(CLI::Range(2, 100000));
  o->add_option("--seed", oracle.seed);
  o->add_option("--count", oracle.count, "Monte Carlo samples")->check(CLI::NonNegativeNumber);
  o->add_option("--eps", oracle.eps)->check(CLI::PositiveNumber);
  o->add_option("--tol", oracle.tol, "Relative slack for the containment check")
      ->check(CLI::NonNegativeNumber);
  o->add_flag("--polish", oracle.polish, "Refine grid extremes by local search");
  o->add_flag("--json", oracle.json);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s)
      return cmd_solve(solve);
    if (*r)
      return cmd_rank(rank_file, rank_json_flag);
    if (*sm)
      return cmd_sample(sample);
    if (*g)
      return cmd_gen(gen);
    if (*o)
      return cmd_oracle(oracle);
  } catch (const ParseError &e) {
    std::cerr << "ilsq: " << e.what() << "\n";
    return kParse;
  } catch (const RankDeficientMidpoint &e) {
    std::cerr << "ilsq: " << e.what() << "\n";
    return kRank;
  } catch (const std::exception &e) {
    std::cerr << "ilsq: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
