#include "ilsq/problem_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ilsq {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::pair<int, int> line_column(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < offset; ++i)
    if (text[i] == '\n') {
      ++line;
      line_start = i + 1;
    }
  return {line, static_cast<int>(offset - line_start) + 1};
}

// Input iterator that publishes how far the parser has read.
class TrackingIterator {
public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char *;
  using reference = const char &;

  TrackingIterator(const char *p, const char **read) : p_(p), read_(read) {}
  reference operator*() const { return *p_; }
  TrackingIterator &operator++() {
    *read_ = ++p_;
    return *this;
  }
  TrackingIterator operator++(int) {
    auto old = *this;
    ++*this;
    return old;
  }
  bool operator==(const TrackingIterator &o) const { return p_ == o.p_; }

private:
  const char *p_;
  const char **read_;
};

// Records the byte offset at which each value starts, keyed by JSON pointer.
class Locator : public nlohmann::json_sax<json> {
public:
  Locator(const char *begin, const char **read) : begin_(begin), read_(read) {}

  std::map<std::string, std::size_t> offsets;

  bool null() override { return scalar(4); }
  bool boolean(bool v) override { return scalar(v ? 4 : 5); }
  bool number_integer(number_integer_t) override { return number(); }
  bool number_unsigned(number_unsigned_t) override { return number(); }
  bool number_float(number_float_t, const string_t &s) override { return scalar(s.size() + 1); }
  bool string(string_t &s) override { return scalar(s.size() + 2); }
  bool binary(binary_t &) override { return true; }
  bool start_object(std::size_t) override { return open(false); }
  bool key(string_t &k) override {
    frames_.back().key = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override { return open(true); }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string &, const nlohmann::detail::exception &) override {
    return false;
  }

private:
  struct Frame {
    bool array;
    std::size_t index = 0;
    std::string key;
    std::string pointer;
  };

  std::string next_pointer() {
    if (frames_.empty())
      return "";
    auto &f = frames_.back();
    return f.pointer + "/" + (f.array ? std::to_string(f.index++) : f.key);
  }
  std::size_t here() const { return static_cast<std::size_t>(*read_ - begin_); }

  // Integer tokens are reported without their text; the lexer has read one
  // character past the token, so back up to the last digit at least.
  bool number() { return scalar(2); }
  bool scalar(std::size_t behind) {
    const std::size_t pos = here();
    offsets[next_pointer()] = pos >= behind ? pos - behind : 0;
    return true;
  }
  bool open(bool array) {
    const std::size_t pos = here();
    std::string p = next_pointer();
    offsets[p] = pos > 0 ? pos - 1 : 0;
    frames_.push_back({array, 0, "", std::move(p)});
    return true;
  }
  bool close() {
    frames_.pop_back();
    return true;
  }

  const char *begin_;
  const char **read_;
  std::vector<Frame> frames_;
};

class Validator {
public:
  explicit Validator(std::string_view text) : text_(text) {}

  [[noreturn]] void fail(const std::string &pointer, const std::string &what) {
    locate();
    std::size_t offset = 0;
    for (std::string p = pointer;; p.erase(p.rfind('/'))) {
      if (auto it = offsets_.find(p); it != offsets_.end()) {
        offset = it->second;
        break;
      }
      if (p.empty())
        break;
    }
    const auto [line, column] = line_column(text_, offset);
    throw ParseError(what + (pointer.empty() ? "" : " (at " + pointer + ")"), line, column);
  }

  IntervalD interval(const json &v, const std::string &pointer) {
    if (v.is_number())
      return IntervalD(v.get<double>());
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(pointer, "expected a number or a [lo, hi] pair");
    const double lo = v[0].get<double>();
    const double hi = v[1].get<double>();
    if (!std::isfinite(lo) || !std::isfinite(hi))
      fail(pointer, "interval endpoints must be finite");
    if (lo > hi)
      fail(pointer, "lower endpoint exceeds upper endpoint");
    return IntervalD(lo, hi);
  }

  Index dimension(const json &doc, const char *key) {
    const std::string pointer = std::string("/") + key;
    if (!doc.contains(key))
      fail("", std::string("missing field \"") + key + "\"");
    const json &v = doc[key];
    if (!v.is_number_integer() || v.get<long long>() < 1)
      fail(pointer, std::string("\"") + key + "\" must be a positive integer");
    return static_cast<Index>(v.get<long long>());
  }

  const json &array_field(const json &doc, const char *key, Index size) {
    const std::string pointer = std::string("/") + key;
    if (!doc.contains(key))
      fail("", std::string("missing field \"") + key + "\"");
    const json &v = doc[key];
    if (!v.is_array() || static_cast<Index>(v.size()) != size)
      fail(pointer, std::string("\"") + key + "\" must be an array of " + std::to_string(size) +
                        " entries");
    return v;
  }

private:
  void locate() {
    if (located_)
      return;
    located_ = true;
    const char *read = text_.data();
    Locator sax(text_.data(), &read);
    json::sax_parse(TrackingIterator(text_.data(), &read),
                    TrackingIterator(text_.data() + text_.size(), &read), &sax);
    offsets_ = std::move(sax.offsets);
  }

  std::string_view text_;
  bool located_ = false;
  std::map<std::string, std::size_t> offsets_;
};

} // namespace

LsqProblem parse_problem(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    std::string what = e.what();
    if (const auto colon = what.find(": "); colon != std::string::npos)
      what.erase(0, colon + 2);
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(what, line, column);
  }

  Validator check(text);
  if (!doc.is_object())
    check.fail("", "problem document must be a JSON object");

  LsqProblem p;
  if (doc.contains("name")) {
    if (!doc["name"].is_string())
      check.fail("/name", "\"name\" must be a string");
    p.name = doc["name"].get<std::string>();
  }
  const Index m = check.dimension(doc, "m");
  const Index n = check.dimension(doc, "n");
  if (m < n)
    check.fail("/m", "need m >= n");

  const json &a = check.array_field(doc, "A", m);
  p.a.resize(m, n);
  for (Index i = 0; i < m; ++i) {
    const std::string row = "/A/" + std::to_string(i);
    const json &ai = a[static_cast<std::size_t>(i)];
    if (!ai.is_array() || static_cast<Index>(ai.size()) != n)
      check.fail(row, "row must have " + std::to_string(n) + " entries");
    for (Index j = 0; j < n; ++j)
      p.a(i, j) = check.interval(ai[static_cast<std::size_t>(j)], row + "/" + std::to_string(j));
  }
  const json &b = check.array_field(doc, "b", m);
  p.b.resize(m);
  for (Index i = 0; i < m; ++i)
    p.b(i) = check.interval(b[static_cast<std::size_t>(i)], "/b/" + std::to_string(i));
  return p;
}

LsqProblem read_problem(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError("cannot read " + path.string(), 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string format_interval(const IntervalD &v) {
  return "[" + format_number(v.lo()) + ", " + format_number(v.hi()) + "]";
}

} // namespace

std::string format_problem(const LsqProblem &p) {
  p.validate();
  std::string out = "{\n";
  if (!p.name.empty())
    out += "  \"name\": " + json(p.name).dump() + ",\n";
  out += "  \"m\": " + std::to_string(p.rows()) + ",\n";
  out += "  \"n\": " + std::to_string(p.cols()) + ",\n";
  out += "  \"A\": [\n";
  for (Index i = 0; i < p.rows(); ++i) {
    out += "    [";
    for (Index j = 0; j < p.cols(); ++j)
      out += (j ? ", " : "") + format_interval(p.a(i, j));
    out += i + 1 < p.rows() ? "],\n" : "]\n";
  }
  out += "  ],\n  \"b\": [\n";
  for (Index i = 0; i < p.rows(); ++i)
    out += "    " + format_interval(p.b(i)) + (i + 1 < p.rows() ? ",\n" : "\n");
  out += "  ]\n}\n";
  return out;
}

void write_problem(const std::filesystem::path &path, const LsqProblem &p) {
  const std::string text = format_problem(p);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

void write_csv(std::ostream &os, const std::vector<RealVector> &points) {
  if (points.empty())
    return;
  const Index n = points.front().size();
  for (Index j = 0; j < n; ++j)
    os << (j ? "," : "") << 'x' << j + 1;
  os << '\n';
  for (const auto &x : points) {
    for (Index j = 0; j < n; ++j)
      os << (j ? "," : "") << format_number(x(j));
    os << '\n';
  }
}

namespace {

ordered_json rank_object(const RankReport &r) {
  ordered_json o;
  o["spectral_value"] = r.spectral_value;
  o["sigma_mid_min"] = r.sigma_mid_min;
  o["sigma_rad_max"] = r.sigma_rad_max;
  o["ratio"] = r.ratio;
  o["spectral_holds"] = r.spectral_holds;
  o["sigma_holds"] = r.sigma_holds;
  o["certified"] = r.certified();
  return o;
}

ordered_json bound_object(const std::optional<PpsResult> &res) {
  if (!res)
    return nullptr;
  ordered_json o;
  o["value"] = res->value;
  o["converged"] = res->stats.converged;
  o["gap"] = res->stats.gap;
  o["omega"] = res->stats.omega;
  o["iterations"] = res->stats.iterations;
  o["time_ms"] = res->stats.wall_ms;
  o["peak_list"] = res->stats.peak_list;
  return o;
}

const char *side_name(BoundSide s) {
  switch (s) {
  case BoundSide::min:
    return "min";
  case BoundSide::max:
    return "max";
  default:
    return "both";
  }
}

} // namespace

std::string rank_json(const RankReport &rank) { return rank_object(rank).dump(2); }

std::string report_json(const IlsqReport &report, const ReportContext &context) {
  ordered_json o;
  o["problem"] = context.problem;
  const auto &s = context.options;
  o["options"] = {
      {"eps", s.eps},
      {"method", s.method == PpsMethod::modified ? "modified" : "simple"},
      {"encl", s.encl.kind == EnclosureKind::krawczyk ? "krawczyk" : "gauss"},
      {"bound", side_name(context.bounds)},
      {"clean_period", s.clean_period},
      {"max_iters", s.max_iters},
      {"time_limit", s.time_limit},
  };
  if (context.seed)
    o["seed"] = *context.seed;
  o["rank"] = report.rank ? rank_object(*report.rank) : ordered_json(nullptr);

  ordered_json comps = ordered_json::array();
  for (const auto &c : report.components) {
    ordered_json e;
    e["component"] = c.component + 1;
    e["lo"] = report.box(c.component).lo();
    e["hi"] = report.box(c.component).hi();
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
    e["gap"] = gap;
    e["iterations"] = iters;
    e["time_ms"] = ms;
    e["converged"] = converged;
    e["lower"] = bound_object(c.lower);
    e["upper"] = bound_object(c.upper);
    comps.push_back(std::move(e));
  }
  o["components"] = std::move(comps);
  ordered_json box = ordered_json::array();
  for (Index j = 0; j < report.box.size(); ++j)
    box.push_back({report.box(j).lo(), report.box(j).hi()});
  o["box"] = std::move(box);
  o["converged"] = report.converged();
  return o.dump(2);
}

} // namespace ilsq
