#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracle_helpers.hpp"
#include "sensbound/envelope.hpp"
#include "sensbound/sweep.hpp"

using namespace sensbound;

namespace {

// Independent algebraic route for the hyperbolic deviation: the bound curves
// for p1 and p2 cross where the log-odds shift reaches
// u* = sqrt(p1(1-p2) / (p2(1-p1))), giving odds(x_alpha) = odds(x0)/u* and
// odds(x_beta) = odds(x0) * u*.
struct OddsDeviation {
  double x_alpha, x_beta;
};

OddsDeviation odds_route(double x0, double p1, double p2) {
  const double u = std::sqrt(p1 * (1.0 - p2) / (p2 * (1.0 - p1)));
  const double odds0 = x0 / (1.0 - x0);
  const double oa = odds0 / u, ob = odds0 * u;
  return {oa / (1.0 + oa), ob / (1.0 + ob)};
}

double rand_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

}  // namespace

TEST_SUITE("envelope") {

TEST_CASE("hyperbolic envelope constants at (0.1, 0.8)") {
  HyperbolicEnvelope env = hyperbolic_envelope(0.1, 0.8);

  CHECK_FALSE(env.increasing.is_line);
  CHECK(env.increasing.s == doctest::Approx(-1.0 / 35).epsilon(1e-12));
  CHECK(env.increasing.t == doctest::Approx(36.0 / 35).epsilon(1e-12));
  CHECK(env.increasing.r == doctest::Approx(-36.0 / 1225).epsilon(1e-12));
  CHECK(env.increasing.quadrant == Quadrant::IV);

  CHECK_FALSE(env.decreasing.is_line);
  CHECK(env.decreasing.s == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(env.decreasing.t == doctest::Approx(-0.8).epsilon(1e-12));
  CHECK(env.decreasing.r == doctest::Approx(1.44).epsilon(1e-12));
  CHECK(env.decreasing.quadrant == Quadrant::I);

  SUBCASE("anchor evaluations") {
    CHECK(env.increasing.value(0.0) == 0.0);
    CHECK(env.increasing.value(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(env.increasing.value(0.1) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(env.decreasing.value(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(env.decreasing.value(1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(env.decreasing.value(0.1) == doctest::Approx(0.8).epsilon(1e-12));
  }

  SUBCASE("boundary anchors rejected") {
    CHECK_THROWS_AS(hyperbolic_envelope(0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(hyperbolic_envelope(0.5, 1.0), std::invalid_argument);
  }
}

TEST_CASE("degenerate anchors become exact lines") {
  HyperbolicEnvelope ident = hyperbolic_envelope(0.3, 0.3);
  CHECK(ident.increasing.is_line);
  CHECK(ident.increasing.value(0.77) == 0.77);
  CHECK_FALSE(ident.decreasing.is_line);

  HyperbolicEnvelope comp = hyperbolic_envelope(0.3, 0.7);
  CHECK(comp.decreasing.is_line);
  CHECK(comp.decreasing.value(0.25) == 0.75);
  CHECK_FALSE(comp.increasing.is_line);

  HyperbolicEnvelope both = hyperbolic_envelope(0.5, 0.5);
  CHECK(both.increasing.is_line);
  CHECK(both.decreasing.is_line);
}

TEST_CASE("envelope bounds") {
  HyperbolicEnvelope env = hyperbolic_envelope(0.37, 0.62);

  SUBCASE("anchored at (x0, p0)") {
    auto [lo, hi] = envelope_bounds_at(env, 0.37);
    CHECK(lo == doctest::Approx(0.62).epsilon(1e-12));
    CHECK(hi == doctest::Approx(0.62).epsilon(1e-12));
  }

  SUBCASE("full range at the corners") {
    auto [lo, hi] = envelope_bounds_at(env, 0.0);
    CHECK(lo == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("ordered on a grid for random anchors") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      HyperbolicEnvelope e = hyperbolic_envelope(rand_in(rng, 0.01, 0.99), rand_in(rng, 0.01, 0.99));
      for (int i = 0; i <= 1000; ++i) {
        auto [lo, hi] = envelope_bounds_at(e, i / 1000.0);
        CHECK(lo <= hi + 1e-15);
      }
    }
  }
}

TEST_CASE("log-odds bounds") {
  SUBCASE("no shift, no change") {
    DeltaBounds b = delta_bound(0.3, 0.44, 0.3);
    CHECK(b.lower == doctest::Approx(0.44).epsilon(1e-12));
    CHECK(b.upper == doctest::Approx(0.44).epsilon(1e-12));
    CHECK_FALSE(b.limit);
  }

  SUBCASE("worked point x1 = 4/13 from (0.1, 0.8): odds ratio 4") {
    DeltaBounds b = delta_bound(0.1, 0.8, 4.0 / 13.0);
    CHECK(b.upper == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
    CHECK(b.lower == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("x1 on the boundary is flagged as a limit") {
    DeltaBounds b = delta_bound(0.1, 0.8, 0.0);
    CHECK(b.limit);
    CHECK(b.lower == 0.0);
    CHECK(b.upper == 1.0);
  }

  SUBCASE("equivalent to the hyperbolic envelope on a grid") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const double x0 = rand_in(rng, 0.01, 0.99), p0 = rand_in(rng, 0.01, 0.99);
      HyperbolicEnvelope env = hyperbolic_envelope(x0, p0);
      for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        auto [lo, hi] = envelope_bounds_at(env, x);
        DeltaBounds b = delta_bound(x0, p0, x);
        CHECK(std::abs(lo - b.lower) <= 1e-12);
        CHECK(std::abs(hi - b.upper) <= 1e-12);
      }
    }
  }
}

TEST_CASE("sensitivity value bound") {
  CHECK(sensitivity_value_bound(0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sensitivity_value_bound(0.1, 0.8) == doctest::Approx(16.0 / 9.0).epsilon(1e-12));
  for (int i = 1; i < 100; ++i) {
    const double p0 = i / 100.0;
    CHECK(sensitivity_value_bound(0.5, p0) <= 1.0 + 1e-12);  // central parameters are insensitive
    CHECK(sensitivity_value_bound(p0, p0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sensitivity_value_bound(0.0, 0.5), std::invalid_argument);

  SUBCASE("equals the envelope slopes at the anchor") {
    Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
      const double x0 = rand_in(rng, 0.01, 0.99), p0 = rand_in(rng, 0.01, 0.99);
      HyperbolicEnvelope env = hyperbolic_envelope(x0, p0);
      const double bound = sensitivity_value_bound(x0, p0);
      CHECK(std::abs(std::abs(env.increasing.slope(x0)) - bound) <= 1e-9);
      CHECK(std::abs(std::abs(env.decreasing.slope(x0)) - bound) <= 1e-9);

      const double fd_i = oracle::central_difference(
          [&](double x) { return env.increasing.value(x); }, x0);
      CHECK(std::abs(fd_i) == doctest::Approx(bound).epsilon(1e-5));
    }
  }
}

TEST_CASE("linear envelope") {
  SUBCASE("cases at (0.1, 0.8)") {
    LinearEnvelope env = linear_envelope(0.1, 0.8);
    // x0 < p0: the increasing line pins (1, 1)
    CHECK(env.increasing.gradient == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
    CHECK(env.increasing.value(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    // x0 < 1 - p0: the decreasing line pins (1, 0)
    CHECK(env.decreasing.gradient == doctest::Approx(-8.0 / 9.0).epsilon(1e-12));
    CHECK(env.decreasing.value(1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(env.increasing.value(0.1) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(env.decreasing.value(0.1) == doctest::Approx(0.8).epsilon(1e-12));
  }

  SUBCASE("central anchor degenerates to the diagonals") {
    LinearEnvelope env = linear_envelope(0.5, 0.5);
    CHECK(env.increasing.gradient == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(env.increasing.intercept == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(env.decreasing.gradient == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(env.decreasing.intercept == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("corner pins per case, random anchors") {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
      const double x0 = rand_in(rng, 0.01, 0.99), p0 = rand_in(rng, 0.01, 0.99);
      LinearEnvelope env = linear_envelope(x0, p0);
      CHECK(env.increasing.value(x0) == doctest::Approx(p0).epsilon(1e-12));
      CHECK(env.decreasing.value(x0) == doctest::Approx(p0).epsilon(1e-12));
      CHECK(env.increasing.gradient > 0.0);
      CHECK(env.decreasing.gradient < 0.0);
      if (x0 >= p0)
        CHECK(std::abs(env.increasing.value(0.0)) <= 1e-12);
      else
        CHECK(std::abs(env.increasing.value(1.0) - 1.0) <= 1e-12);
      if (x0 >= 1.0 - p0)
        CHECK(std::abs(env.decreasing.value(0.0) - 1.0) <= 1e-12);
      else
        CHECK(std::abs(env.decreasing.value(1.0)) <= 1e-12);
    }
  }

  SUBCASE("lies within the hyperbolic envelope pointwise") {
    Rng rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
      const double x0 = rand_in(rng, 0.01, 0.99), p0 = rand_in(rng, 0.01, 0.99);
      HyperbolicEnvelope henv = hyperbolic_envelope(x0, p0);
      LinearEnvelope lenv = linear_envelope(x0, p0);
      for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        auto [hlo, hhi] = envelope_bounds_at(henv, x);
        auto [llo, lhi] = envelope_bounds_at(lenv, x);
        CHECK(llo >= hlo - 1e-12);
        CHECK(lhi <= hhi + 1e-12);
      }
    }
  }
}

TEST_CASE("linear sensitivity value bound") {
  CHECK(linear_sensitivity_value_bound(0.5, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(linear_sensitivity_value_bound(0.1, 0.8) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));

  Rng rng(37);
  for (int trial = 0; trial < 10000; ++trial) {
    const double x0 = rand_in(rng, 0.001, 0.999), p0 = rand_in(rng, 0.001, 0.999);
    const double lin = linear_sensitivity_value_bound(x0, p0);
    CHECK(lin <= 1.0 + 1e-12);
    CHECK(lin <= sensitivity_value_bound(x0, p0) + 1e-12);
  }
}

TEST_CASE("hyperbolic minimum admissible deviation") {
  SUBCASE("equal anchors permit no deviation") {
    DeviationBound d = min_admissible_deviation_hyperbolic(0.1, 0.5, 0.5);
    CHECK(d.alpha == 0.0);
    CHECK(d.beta == 0.0);
    CHECK(d.x_alpha == 0.1);
    CHECK(d.x_beta == 0.1);
  }

  SUBCASE("regression: (0.1, 0.8, 0.2) pinned from the intersection oracle") {
    // The text figure 0.075/0.269 for this point is display-derived; the
    // closed form and both numeric oracles agree on 27/370 and 27/130.
    DeviationBound d = min_admissible_deviation_hyperbolic(0.1, 0.8, 0.2);
    CHECK(d.alpha == doctest::Approx(27.0 / 370.0).epsilon(1e-12));
    CHECK(d.beta == doctest::Approx(27.0 / 130.0).epsilon(1e-12));
    CHECK(d.x_alpha == doctest::Approx(1.0 / 37.0).epsilon(1e-12));
    CHECK(d.x_beta == doctest::Approx(4.0 / 13.0).epsilon(1e-12));
    CHECK_FALSE(d.clamped_low);
    CHECK_FALSE(d.clamped_high);
  }

  SUBCASE("degenerate quadratic at (0.8, 0.8, 0.2)") {
    DeviationBound d = min_admissible_deviation_hyperbolic(0.8, 0.8, 0.2);
    CHECK(d.x_alpha == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.x_beta == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
  }

  SUBCASE("central parameter is symmetric") {
    Rng rng(41);
    for (int trial = 0; trial < 300; ++trial) {
      const double p2 = rand_in(rng, 0.01, 0.49);
      const double p1 = rand_in(rng, p2, std::min(0.99, 1.0 - p2));
      DeviationBound d = min_admissible_deviation_hyperbolic(0.5, p1, p2);
      CHECK(d.alpha == doctest::Approx(d.beta).epsilon(1e-12));
    }
  }

  SUBCASE("misordered arguments rejected") {
    CHECK_THROWS_AS(min_admissible_deviation_hyperbolic(0.1, 0.2, 0.8), std::invalid_argument);
  }

  SUBCASE("agrees with bisection and the odds route on random triples") {
    Rng rng(43);
    for (int trial = 0; trial < 300; ++trial) {
      const double x0 = rand_in(rng, 0.01, 0.99);
      const double p2 = rand_in(rng, 0.01, 0.98);
      const double p1 = rand_in(rng, p2, 0.99);
      DeviationBound closed = min_admissible_deviation_hyperbolic(x0, p1, p2);
      DeviationBound oracle = deviation_by_intersection(x0, p1, p2, FunctionKind::hyperbolic);
      CHECK(std::abs(closed.x_alpha - oracle.x_alpha) <= 1e-9);
      CHECK(std::abs(closed.x_beta - oracle.x_beta) <= 1e-9);
      OddsDeviation odds = odds_route(x0, p1, p2);
      CHECK(closed.x_alpha == doctest::Approx(odds.x_alpha).epsilon(1e-11));
      CHECK(closed.x_beta == doctest::Approx(odds.x_beta).epsilon(1e-11));
    }
  }
}

TEST_CASE("linear minimum admissible deviation") {
  SUBCASE("worked point (0.8, 0.8, 0.2): deviation (0.3, 0.2), interval [0.5, 1]") {
    DeviationBound d = min_admissible_deviation_linear(0.8, 0.8, 0.2);
    CHECK(d.alpha == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(d.beta == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(d.x_alpha == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.x_beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(d.clamped_low);
    CHECK(d.clamped_high);  // the raw intersection lands at 2.0
  }

  SUBCASE("equal anchors permit no deviation") {
    DeviationBound d = min_admissible_deviation_linear(0.8, 0.2, 0.2);
    CHECK(d.alpha == 0.0);
    CHECK(d.beta == 0.0);
  }

  SUBCASE("negative intersection clamps the shift to x0") {
    DeviationBound d = min_admissible_deviation_linear(0.2, 0.9, 0.05);
    CHECK(d.clamped_low);
    CHECK(d.x_alpha == 0.0);
    CHECK(d.alpha == doctest::Approx(0.2).epsilon(1e-12));
  }

  SUBCASE("matches the direct line intersection") {
    Rng rng(47);
    for (int trial = 0; trial < 500; ++trial) {
      const double x0 = rand_in(rng, 0.01, 0.99);
      const double p2 = rand_in(rng, 0.01, 0.98);
      const double p1 = rand_in(rng, p2, 0.99);
      DeviationBound closed = min_admissible_deviation_linear(x0, p1, p2);
      DeviationBound oracle = deviation_by_intersection(x0, p1, p2, FunctionKind::linear);
      CHECK(std::abs(closed.x_alpha - oracle.x_alpha) <= 1e-12);
      CHECK(std::abs(closed.x_beta - oracle.x_beta) <= 1e-12);
    }
  }

  SUBCASE("adjacent case formulas agree at the case boundaries") {
    // x0 = p1 joins the cases of the increasing line; x0 = 1 - p2 those of
    // the decreasing one. The formulas are continuous across each seam.
    Rng rng(53);
    for (int trial = 0; trial < 200; ++trial) {
      const double p2 = rand_in(rng, 0.02, 0.45);
      const double p1 = rand_in(rng, std::max(p2, 0.05), 0.95);
      const double eps = 1e-9;
      for (double seam : {p1, 1.0 - p2}) {
        if (seam <= eps || seam >= 1.0 - eps) continue;
        DeviationBound below = min_admissible_deviation_linear(seam - eps, p1, p2);
        DeviationBound at = min_admissible_deviation_linear(seam, p1, p2);
        DeviationBound above = min_admissible_deviation_linear(seam + eps, p1, p2);
        CHECK(std::abs(below.x_alpha - at.x_alpha) <= 1e-6);
        CHECK(std::abs(above.x_alpha - at.x_alpha) <= 1e-6);
        CHECK(std::abs(below.x_beta - at.x_beta) <= 1e-6);
        CHECK(std::abs(above.x_beta - at.x_beta) <= 1e-6);
      }
    }
  }
}

TEST_CASE("n-ary deviation") {
  SUBCASE("single competitor reduces to the pairwise bound") {
    for (auto kind : {FunctionKind::hyperbolic, FunctionKind::linear}) {
      const std::vector<double> one{0.2};
      DeviationBound n = min_deviation_nary(0.1, 0.8, one, kind);
      DeviationBound p = kind == FunctionKind::linear
                             ? min_admissible_deviation_linear(0.1, 0.8, 0.2)
                             : min_admissible_deviation_hyperbolic(0.1, 0.8, 0.2);
      CHECK(n.alpha == p.alpha);
      CHECK(n.beta == p.beta);
    }
  }

  SUBCASE("duplicate competitors change nothing") {
    const std::vector<double> twice{0.2, 0.2};
    const std::vector<double> once{0.2};
    DeviationBound a = min_deviation_nary(0.1, 0.6, twice, FunctionKind::hyperbolic);
    DeviationBound b = min_deviation_nary(0.1, 0.6, once, FunctionKind::hyperbolic);
    CHECK(a.alpha == b.alpha);
    CHECK(a.beta == b.beta);
  }

  SUBCASE("componentwise minimum over competitors") {
    const std::vector<double> comps{0.3, 0.1};
    DeviationBound n = min_deviation_nary(0.4, 0.5, comps, FunctionKind::hyperbolic);
    DeviationBound a = min_admissible_deviation_hyperbolic(0.4, 0.5, 0.3);
    DeviationBound b = min_admissible_deviation_hyperbolic(0.4, 0.5, 0.1);
    CHECK(n.alpha == doctest::Approx(std::min(a.alpha, b.alpha)).epsilon(1e-15));
    CHECK(n.beta == doctest::Approx(std::min(a.beta, b.beta)).epsilon(1e-15));
    CHECK(n.alpha <= a.alpha);
    CHECK(n.beta <= b.beta);
  }

  SUBCASE("input validation") {
    const std::vector<double> empty;
    CHECK_THROWS_AS(min_deviation_nary(0.4, 0.5, empty, FunctionKind::linear),
                    std::invalid_argument);
    const std::vector<double> dominating{0.6};
    CHECK_THROWS_AS(min_deviation_nary(0.4, 0.5, dominating, FunctionKind::linear),
                    std::invalid_argument);
    const std::vector<double> overflowing{0.5, 0.49, 0.49};
    CHECK_THROWS_AS(min_deviation_nary(0.4, 0.5, overflowing, FunctionKind::linear),
                    std::invalid_argument);
  }
}

TEST_CASE("deviation monotonicity in the winning probability") {
  // Verified numerically rather than assumed: alpha and beta are
  // nondecreasing in p1 along the binary section p2 = 1 - p1.
  for (auto kind : {FunctionKind::hyperbolic, FunctionKind::linear}) {
    for (double x0 : {0.1, 0.3, 0.5, 0.8}) {
      double prev_alpha = -1.0, prev_beta = -1.0;
      for (int i = 500; i < 1000; ++i) {
        const double p1 = i / 1000.0;
        auto d = kind == FunctionKind::linear
                     ? min_admissible_deviation_linear(x0, p1, 1.0 - p1)
                     : min_admissible_deviation_hyperbolic(x0, p1, 1.0 - p1);
        CHECK(d.alpha >= prev_alpha - 1e-12);
        CHECK(d.beta >= prev_beta - 1e-12);
        prev_alpha = d.alpha;
        prev_beta = d.beta;
      }
    }
  }
}

TEST_CASE("evidence-invariant deviation") {
  SUBCASE("linear usage: at least (0.3, 0.2) for any profile with p1 >= 0.8") {
    EvidenceInvariantDeviation d =
        evidence_invariant_deviation(0.8, 0.8, FunctionKind::linear);
    CHECK(d.bound.alpha == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(d.bound.beta == doctest::Approx(0.2).epsilon(1e-12));
    // monotone in p1, so the grid minimum sits at the lower edge
    CHECK(d.p1_at_min_alpha == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(d.p1_at_min_beta == doctest::Approx(0.8).epsilon(1e-12));
  }

  SUBCASE("hyperbolic usage matches the pairwise bound at the lower edge") {
    EvidenceInvariantDeviation d =
        evidence_invariant_deviation(0.1, 0.8, FunctionKind::hyperbolic);
    CHECK(d.bound.alpha == doctest::Approx(27.0 / 370.0).epsilon(1e-12));
    CHECK(d.bound.beta == doctest::Approx(27.0 / 130.0).epsilon(1e-12));
  }

  SUBCASE("shifts grow as the competitor mass vanishes") {
    EvidenceInvariantDeviation low =
        evidence_invariant_deviation(0.3, 0.6, FunctionKind::hyperbolic);
    EvidenceInvariantDeviation high =
        evidence_invariant_deviation(0.3, 0.99, FunctionKind::hyperbolic);
    CHECK(high.bound.alpha > low.bound.alpha);
    CHECK(high.bound.beta > low.bound.beta);
  }

  SUBCASE("p1_lower below one half rejected") {
    CHECK_THROWS_AS(evidence_invariant_deviation(0.3, 0.4, FunctionKind::linear),
                    std::invalid_argument);
  }
}

}  // TEST_SUITE
