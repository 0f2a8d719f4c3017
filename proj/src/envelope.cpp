#include "sensbound/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace sensbound {

namespace {

void require_interior(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0))
    throw std::invalid_argument(std::string(name) + " must lie strictly inside (0, 1), got " +
                                std::to_string(v));
}

void require_ordered(double p1, double p2) {
  require_interior(p1, "p1");
  require_interior(p2, "p2");
  if (p1 < p2) throw std::invalid_argument("p1 must be at least p2; swap the arguments");
}

DeviationBound zero_deviation(double x0) {
  DeviationBound d;
  d.x_alpha = d.x_beta = x0;
  return d;
}

// Root of f on [lo, hi] given f(lo) < 0 < f(hi).
template <typename F>
double bisect(F f, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double EnvelopeBranch::value(double x) const {
  if (is_line) return (increasing ? x : 1.0 - x) + t_shift;
  // Rearranged forms of r/(x - s) + t that pin the unit-square corners
  // exactly: r = s(1-s), t = 1-s for the increasing branch and r = s(s-1),
  // t = s for the decreasing one.
  return (increasing ? (1.0 - s) * x / (x - s) : s * (x - 1.0) / (x - s)) + t_shift;
}

double EnvelopeBranch::slope(double x) const {
  if (is_line) return increasing ? 1.0 : -1.0;
  return -r / ((x - s) * (x - s));
}

HyperbolicEnvelope hyperbolic_envelope(double x0, double p0) {
  require_interior(x0, "x0");
  require_interior(p0, "p0");

  HyperbolicEnvelope env;
  env.x0 = x0;
  env.p0 = p0;

  env.increasing.increasing = true;
  if (std::abs(x0 - p0) < kDegenerateAnchorTolerance) {
    env.increasing.is_line = true;
  } else {
    double s = x0 * (1.0 - p0) / (x0 - p0);
    env.increasing.s = s;
    env.increasing.t = 1.0 - s;
    env.increasing.r = s * (1.0 - s);
    env.increasing.quadrant = s < 0.0 ? Quadrant::IV : Quadrant::II;
  }

  env.decreasing.increasing = false;
  if (std::abs(x0 + p0 - 1.0) < kDegenerateAnchorTolerance) {
    env.decreasing.is_line = true;
  } else {
    double s = p0 * x0 / (x0 + p0 - 1.0);
    env.decreasing.s = s;
    env.decreasing.t = s;
    env.decreasing.r = s * (s - 1.0);
    env.decreasing.quadrant = s < 0.0 ? Quadrant::I : Quadrant::III;
  }
  return env;
}

LinearEnvelope linear_envelope(double x0, double p0) {
  require_interior(x0, "x0");
  require_interior(p0, "p0");

  LinearEnvelope env;
  env.x0 = x0;
  env.p0 = p0;
  if (x0 >= p0)
    env.increasing = {p0 / x0, 0.0};
  else
    env.increasing = {(1.0 - p0) / (1.0 - x0), (p0 - x0) / (1.0 - x0)};
  if (x0 >= 1.0 - p0)
    env.decreasing = {(p0 - 1.0) / x0, 1.0};
  else
    env.decreasing = {-p0 / (1.0 - x0), p0 / (1.0 - x0)};
  return env;
}

std::pair<double, double> envelope_bounds_at(const HyperbolicEnvelope& env, double x) {
  double i = env.increasing.value(x);
  double d = env.decreasing.value(x);
  return {std::min(i, d), std::max(i, d)};
}

std::pair<double, double> envelope_bounds_at(const LinearEnvelope& env, double x) {
  double i = env.increasing.value(x);
  double d = env.decreasing.value(x);
  return {std::min(i, d), std::max(i, d)};
}

DeltaBounds delta_bound(double x0, double p0, double x1) {
  require_interior(x0, "x0");
  require_interior(p0, "p0");
  if (!(x1 >= 0.0 && x1 <= 1.0)) throw std::invalid_argument("x1 must lie within [0, 1]");

  DeltaBounds b;
  if (x1 == 0.0 || x1 == 1.0) {
    b.lower = 0.0;
    b.upper = 1.0;
    b.limit = true;
    return b;
  }
  const double delta = std::abs(std::log(x1 / (1.0 - x1)) - std::log(x0 / (1.0 - x0)));
  const double u = std::exp(-delta);  // in (0, 1]
  b.lower = p0 * u / (p0 * u + (1.0 - p0));
  b.upper = p0 / (p0 + (1.0 - p0) * u);
  return b;
}

double sensitivity_value_bound(double x0, double p0) {
  require_interior(x0, "x0");
  require_interior(p0, "p0");
  return p0 * (1.0 - p0) / (x0 * (1.0 - x0));
}

double linear_sensitivity_value_bound(double x0, double p0) {
  LinearEnvelope env = linear_envelope(x0, p0);
  return std::max(std::abs(env.increasing.gradient), std::abs(env.decreasing.gradient));
}

DeviationBound min_admissible_deviation_hyperbolic(double x0, double p1, double p2) {
  require_interior(x0, "x0");
  require_ordered(p1, p2);
  if (p1 == p2) return zero_deviation(x0);

  const double q_const = std::sqrt(p1 * (1.0 - p1) * p2 * (1.0 - p2));
  // Both branch-intersection quadratics share this discriminant root:
  // sqrt(B^2 - 4AC) = 2 x0 (1 - x0) Q.
  const double sqrt_disc = 2.0 * x0 * (1.0 - x0) * q_const;

  DeviationBound oracle;  // computed lazily, only to break root-selection ties
  bool have_oracle = false;
  auto oracle_bound = [&]() -> const DeviationBound& {
    if (!have_oracle) {
      oracle = deviation_by_intersection(x0, p1, p2, FunctionKind::hyperbolic);
      have_oracle = true;
    }
    return oracle;
  };

  // Quadratic A x^2 + B x + C from cross-multiplying the branch
  // intersection. The roots are computed through q = -(B + sqrt(disc))/2
  // (B > 0 here), which keeps the in-interval root stable when A
  // degenerates to zero. Selection is by interval membership with 1e-12
  // slack at the endpoints; an ambiguous double hit defers to the
  // intersection oracle.
  auto select_root = [&](double a, double b, double c, double lo, double hi, bool alpha_side) {
    const double q = -0.5 * (b + sqrt_disc);
    const double stable = c / q;
    const double other = a != 0.0 ? q / a : std::numeric_limits<double>::infinity();
    const bool stable_in = stable >= lo - 1e-12 && stable <= hi + 1e-12;
    const bool other_in = std::isfinite(other) && other >= lo - 1e-12 && other <= hi + 1e-12;
    double chosen;
    if (stable_in && other_in && stable != other) {
      std::cerr << "sensbound: both deviation roots inside the interval; using the one"
                   " matching the intersection oracle\n";
      const double ref = alpha_side ? oracle_bound().x_alpha : oracle_bound().x_beta;
      chosen = std::abs(other - ref) < std::abs(stable - ref) ? other : stable;
    } else if (stable_in) {
      chosen = stable;
    } else if (other_in) {
      chosen = other;
    } else {
      throw std::logic_error("no envelope-intersection root inside the interval");
    }
    return std::clamp(chosen, lo, hi);
  };

  DeviationBound dev;
  dev.x_alpha = select_root((p1 - p2) * x0 * x0 + (1.0 - 2.0 * x0) * p1 * (1.0 - p2),
                            2.0 * (1.0 - p1) * p2 * x0 * x0, -(1.0 - p1) * p2 * x0 * x0,
                            0.0, x0, true);
  dev.x_beta = select_root((p2 - p1) * x0 * x0 + (1.0 - 2.0 * x0) * p2 * (1.0 - p1),
                           2.0 * (1.0 - p2) * p1 * x0 * x0, -(1.0 - p2) * p1 * x0 * x0,
                           x0, 1.0, false);
  dev.alpha = x0 - dev.x_alpha;
  dev.beta = dev.x_beta - x0;
  return dev;
}

DeviationBound min_admissible_deviation_linear(double x0, double p1, double p2) {
  require_interior(x0, "x0");
  require_ordered(p1, p2);
  if (p1 == p2) return zero_deviation(x0);

  auto alpha_side = [&](double pa, double pb) {
    // Intersection of the increasing line for pa with the decreasing line
    // for pb; the case split mirrors which corners those lines pin.
    if (x0 >= pa && x0 < 1.0 - pb) return pb * x0 / (pa - (pa - pb) * x0);
    if (x0 >= pa) return x0 / (pa - pb + 1.0);
    if (x0 >= 1.0 - pb) return (1.0 - pa) * x0 / (1.0 - pb - (pa - pb) * x0);
    return (pa - pb - x0) / (pa - pb - 1.0);
  };

  DeviationBound dev;
  const double raw_alpha = alpha_side(p1, p2);
  const double raw_beta = alpha_side(p2, p1);
  dev.clamped_low = raw_alpha < 0.0;
  dev.clamped_high = raw_beta > 1.0;
  dev.x_alpha = std::max(raw_alpha, 0.0);
  dev.x_beta = std::min(raw_beta, 1.0);
  dev.alpha = x0 - dev.x_alpha;
  dev.beta = dev.x_beta - x0;
  return dev;
}

DeviationBound min_deviation_nary(double x0, double p1, std::span<const double> competitors,
                                  FunctionKind kind) {
  if (competitors.empty()) throw std::invalid_argument("competitor list must not be empty");
  double sum = p1;
  for (double p : competitors) {
    if (p > p1) throw std::invalid_argument("p1 must dominate every competitor");
    sum += p;
  }
  if (sum > 1.0 + 1e-9)
    throw std::invalid_argument("state probabilities exceed 1");

  auto pairwise = kind == FunctionKind::linear ? min_admissible_deviation_linear
                                               : min_admissible_deviation_hyperbolic;
  DeviationBound out;
  bool first = true;
  for (double p : competitors) {
    DeviationBound d = pairwise(x0, p1, p);
    if (first || d.alpha < out.alpha) {
      out.alpha = d.alpha;
      out.x_alpha = d.x_alpha;
      out.clamped_low = d.clamped_low;
    }
    if (first || d.beta < out.beta) {
      out.beta = d.beta;
      out.x_beta = d.x_beta;
      out.clamped_high = d.clamped_high;
    }
    first = false;
  }
  return out;
}

EvidenceInvariantDeviation evidence_invariant_deviation(double x0, double p1_lower,
                                                        FunctionKind kind) {
  require_interior(x0, "x0");
  if (!(p1_lower >= 0.5 && p1_lower < 1.0))
    throw std::invalid_argument("p1_lower must lie in [0.5, 1)");

  auto pairwise = kind == FunctionKind::linear ? min_admissible_deviation_linear
                                               : min_admissible_deviation_hyperbolic;
  constexpr int kPoints = 10001;
  const double step = (1.0 - p1_lower) / kPoints;  // half-open grid, p1 never reaches 1

  EvidenceInvariantDeviation out;
  bool first = true;
  for (int k = 0; k < kPoints; ++k) {
    const double p1 = p1_lower + k * step;
    const DeviationBound d = pairwise(x0, p1, 1.0 - p1);
    if (first || d.alpha < out.bound.alpha) {
      out.bound.alpha = d.alpha;
      out.bound.x_alpha = d.x_alpha;
      out.bound.clamped_low = d.clamped_low;
      out.p1_at_min_alpha = p1;
    }
    if (first || d.beta < out.bound.beta) {
      out.bound.beta = d.beta;
      out.bound.x_beta = d.x_beta;
      out.bound.clamped_high = d.clamped_high;
      out.p1_at_min_beta = p1;
    }
    first = false;
  }
  return out;
}

DeviationBound deviation_by_intersection(double x0, double p1, double p2, FunctionKind kind) {
  require_interior(x0, "x0");
  require_ordered(p1, p2);
  if (p1 == p2) return zero_deviation(x0);

  DeviationBound dev;
  if (kind == FunctionKind::linear) {
    const LinearEnvelope e1 = linear_envelope(x0, p1);
    const LinearEnvelope e2 = linear_envelope(x0, p2);
    const double raw_alpha = (e2.decreasing.intercept - e1.increasing.intercept) /
                             (e1.increasing.gradient - e2.decreasing.gradient);
    const double raw_beta = (e1.decreasing.intercept - e2.increasing.intercept) /
                            (e2.increasing.gradient - e1.decreasing.gradient);
    dev.clamped_low = raw_alpha < 0.0;
    dev.clamped_high = raw_beta > 1.0;
    dev.x_alpha = std::max(raw_alpha, 0.0);
    dev.x_beta = std::min(raw_beta, 1.0);
  } else {
    const HyperbolicEnvelope e1 = hyperbolic_envelope(x0, p1);
    const HyperbolicEnvelope e2 = hyperbolic_envelope(x0, p2);
    // i1 - d2 runs from -1 at x = 0 to p1 - p2 > 0 at x0; d1 - i2 mirrors it
    // on the other side.
    dev.x_alpha = bisect(
        [&](double x) { return e1.increasing.value(x) - e2.decreasing.value(x); }, 0.0, x0);
    dev.x_beta = bisect(
        [&](double x) { return e2.increasing.value(x) - e1.decreasing.value(x); }, x0, 1.0);
  }
  dev.alpha = x0 - dev.x_alpha;
  dev.beta = dev.x_beta - x0;
  return dev;
}

}  // namespace sensbound
