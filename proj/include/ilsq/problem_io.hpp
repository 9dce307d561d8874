#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ilsq/augment.hpp"
#include "ilsq/pps.hpp"

namespace ilsq {

/// Malformed problem document. Line and column are 1-based; both are 0 when
/// no position applies (unreadable file).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, int line, int column)
      : std::runtime_error(line > 0 ? std::to_string(line) + ":" + std::to_string(column) +
                                          ": " + what
                                    : what),
        line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Problem document:
///
///   {"name": "...", "m": 3, "n": 2,
///    "A": [[[lo, hi], [lo, hi]], ...],
///    "b": [[lo, hi], ...]}
///
/// A bare number stands for a degenerate interval; "name" is optional.
LsqProblem parse_problem(std::string_view text);
LsqProblem read_problem(const std::filesystem::path &path);

/// Canonical text of a problem; every endpoint with 17 significant digits.
std::string format_problem(const LsqProblem &p);
void write_problem(const std::filesystem::path &path, const LsqProblem &p);

std::string format_number(double v);

/// One row per point with header x1..xn.
void write_csv(std::ostream &os, const std::vector<RealVector> &points);

struct ReportContext {
  std::string problem;
  SolveOptions options;
  BoundSide bounds = BoundSide::both;
  std::optional<std::uint64_t> seed;
};

std::string rank_json(const RankReport &rank);
std::string report_json(const IlsqReport &report, const ReportContext &context);

} // namespace ilsq
