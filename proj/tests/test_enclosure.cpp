#include <doctest.h>

#include "ilsq/enclosure.hpp"
#include "ilsq/point_numerics.hpp"
#include "support.hpp"

using namespace ilsq;

namespace {

const EnclosureMethod kKrawczyk{};
const EnclosureMethod kGauss{EnclosureKind::interval_gauss};

} // namespace

TEST_CASE("point systems are enclosed to within 4 ulp of the exact solution") {
  test::Random rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(2, 6);
    RealMatrix q(n, n);
    for (Index i = 0; i < q.size(); ++i)
      q(i) = rng.uniform(-5, 5);
    q.diagonal().array() += 6.0;
    RealVector r(n);
    for (Index i = 0; i < n; ++i)
      r(i) = rng.uniform(-5, 5);
    const auto x_exact = test::exact_solve(q, r);
    const IntervalVector x = encl(kKrawczyk, to_interval(q), to_interval(r));
    for (Index i = 0; i < n; ++i) {
      const auto &xi = x_exact[static_cast<std::size_t>(i)];
      REQUIRE(test::exact(x(i).lo()) <= xi);
      REQUIRE(xi <= test::exact(x(i).hi()));
      const double nearest = static_cast<double>(xi);
      CHECK(test::ulp_distance(x(i).lo(), nearest) <= 4);
      CHECK(test::ulp_distance(x(i).hi(), nearest) <= 4);
    }
  }
}

TEST_CASE("enclosures contain member solutions") {
  test::Random rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = rng.integer(2, 5);
    IntervalMatrix q(n, n);
    for (Index i = 0; i < q.size(); ++i)
      q(i) = rng.interval(-1, 1, 0, 0.05);
    for (Index i = 0; i < n; ++i)
      q(i, i) = rng.interval(4, 6, 0, 0.2);
    const IntervalVector r = rng.rhs(n, 0.5);
    const auto e = enclose_with_inverse(kKrawczyk, q, r);
    const IntervalVector g = encl(kGauss, q, r);
    CHECK(contains(e.x, encl(kKrawczyk, q, r)));
    CHECK(contains(encl(kKrawczyk, q, r), e.x));
    for (int s = 0; s < 50; ++s) {
      const RealMatrix qm = rng.member(q);
      const RealVector rm = rng.member(r);
      const RealVector x = solve(qm, rm);
      CHECK(contains(e.x, x));
      CHECK(contains(g, x));
      CHECK(contains(e.inverse, inverse(qm)));
    }
  }
}

TEST_CASE("upsilon is the lower endpoint of the chosen component") {
  IntervalMatrix q(2, 2);
  q << IntervalD(2, 3), IntervalD(0), IntervalD(0), IntervalD(1);
  IntervalVector r(2);
  r << IntervalD(2, 6), IntervalD(-1, 1);
  const IntervalVector x = encl(kKrawczyk, q, r);
  CHECK(upsilon(kKrawczyk, q, r, 0) == x(0).lo());
  CHECK(x(0).lo() <= 2.0 / 3.0);
  CHECK(x(0).hi() >= 3.0);
  CHECK_THROWS_AS(upsilon(kKrawczyk, q, r, 2), std::out_of_range);
}

TEST_CASE("singular interval matrices are rejected") {
  IntervalMatrix q(2, 2);
  q << IntervalD(-1, 1), IntervalD(0), IntervalD(0), IntervalD(1);
  IntervalVector r(2);
  r << 1, 1;
  CHECK_THROWS_AS(encl(kKrawczyk, q, r), EnclosureFailure);
  CHECK_THROWS_AS(encl(kGauss, q, r), EnclosureFailure);
  IntervalMatrix s(2, 2);
  s << 1, 2, 2, 4;
  CHECK_THROWS_AS(encl(kKrawczyk, s, r), EnclosureFailure);
  CHECK_THROWS_AS(encl(kKrawczyk, IntervalMatrix(2, 3), r), std::invalid_argument);
  CHECK_THROWS_AS((EnclosureMethod{EnclosureKind::krawczyk, 0}.validate()), std::invalid_argument);
}

TEST_CASE("extended systems of certified problems are regular") {
  for (const auto &family : problem_families()) {
    const auto sys = build_extended(named_problem(family));
    const auto e = enclose_with_inverse(kKrawczyk, sys.matrix, sys.rhs);
    CHECK(e.x.size() == sys.m + sys.n);
  }
}
