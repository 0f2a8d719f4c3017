#pragma once

#include <span>
#include <utility>

#include "sensbound/sensfun.hpp"

namespace sensbound {

/// Anchors closer than this to p0 = x0 (or p0 + x0 = 1) use the exact line
/// substitute instead of hyperbola constants, whose formulas divide by the
/// vanishing gap.
inline constexpr double kDegenerateAnchorTolerance = 1e-12;

/// One bounding curve through (x0, p0) and two unit-square corners: a
/// rectangular-hyperbola branch, or an exact line when the anchor
/// degenerates (identity line for the increasing curve, 1 - x for the
/// decreasing one).
struct EnvelopeBranch {
  bool increasing = true;
  bool is_line = false;
  double r = 0.0, s = 0.0, t = 0.0;  // hyperbola constants when !is_line
  Quadrant quadrant = Quadrant::I;   // when !is_line
  double t_shift = 0.0;  // fault-injection hook: uniform offset, normally zero

  double value(double x) const;
  double slope(double x) const;
};

/// Every sensitivity function through (x0, p0) stays between these two
/// curves on [0, 1]: the increasing branch runs (0,0)-(x0,p0)-(1,1), the
/// decreasing one (0,1)-(x0,p0)-(1,0).
struct HyperbolicEnvelope {
  double x0 = 0.0, p0 = 0.0;
  EnvelopeBranch increasing, decreasing;
};

HyperbolicEnvelope hyperbolic_envelope(double x0, double p0);

struct Line {
  double gradient = 0.0, intercept = 0.0;
  double value(double x) const { return gradient * x + intercept; }
};

/// Tighter bounds valid for linear sensitivity functions only. Which corner
/// each line pins depends on the anchor: the increasing line passes (0,0)
/// when x0 >= p0 and (1,1) otherwise; the decreasing line passes (0,1) when
/// x0 >= 1 - p0 and (1,0) otherwise.
struct LinearEnvelope {
  double x0 = 0.0, p0 = 0.0;
  Line increasing, decreasing;
};

LinearEnvelope linear_envelope(double x0, double p0);

/// (min, max) of the two envelope curves at x; both equal p0 at x = x0.
std::pair<double, double> envelope_bounds_at(const HyperbolicEnvelope& env, double x);
std::pair<double, double> envelope_bounds_at(const LinearEnvelope& env, double x);

/// Log-odds bounds on the probability of interest after shifting the
/// parameter from x0 to x1. `limit` marks the degenerate x1 in {0, 1} case
/// where the bounds collapse to the trivial (0, 1).
struct DeltaBounds {
  double lower = 0.0, upper = 1.0;
  bool limit = false;
};

DeltaBounds delta_bound(double x0, double p0, double x1);

/// Upper bound p0(1-p0) / (x0(1-x0)) on |f'(x0)|; equals the envelope
/// branches' slope magnitude at the anchor.
double sensitivity_value_bound(double x0, double p0);

/// Upper bound on |f'(x0)| for linear sensitivity functions: the larger
/// gradient magnitude of the two linear envelope lines. Never exceeds 1 nor
/// the hyperbolic bound.
double linear_sensitivity_value_bound(double x0, double p0);

/// Evidence-invariant lower bound on the admissible deviation, computed only
/// from the anchor probabilities of the two leading states. x_alpha/x_beta
/// are the bounding parameter values after clamping to [0, 1]; the clamped
/// flags record when the raw curve intersection fell outside.
struct DeviationBound {
  double alpha = 0.0, beta = 0.0;
  double x_alpha = 0.0, x_beta = 0.0;
  bool clamped_low = false, clamped_high = false;
};

/// Closed-form minimum admissible deviation from the intersections of the
/// hyperbolic envelopes for p1 and p2 (p1 >= p2). Both quadratic roots are
/// evaluated and the one inside the half-interval is selected.
DeviationBound min_admissible_deviation_hyperbolic(double x0, double p1, double p2);

/// Case-split closed form from the intersections of the linear envelopes;
/// intersections outside [0, 1] clamp to the boundary.
DeviationBound min_admissible_deviation_linear(double x0, double p1, double p2);

/// Componentwise minimum of the pairwise deviation over every competitor.
DeviationBound min_deviation_nary(double x0, double p1, std::span<const double> competitors,
                                  FunctionKind kind);

/// Pairwise deviation minimized over all binary anchors p1 in
/// [p1_lower, 1) with p2 = 1 - p1, on a uniform 10,001-point grid; valid for
/// any profile known to induce a winning probability of at least p1_lower.
struct EvidenceInvariantDeviation {
  DeviationBound bound;
  double p1_at_min_alpha = 0.0, p1_at_min_beta = 0.0;
};

EvidenceInvariantDeviation evidence_invariant_deviation(double x0, double p1_lower,
                                                        FunctionKind kind);

/// Numeric intersection of the envelope curves (bisection on hyperbolic
/// branches, direct solve for lines): the runtime oracle the closed forms
/// are validated against.
DeviationBound deviation_by_intersection(double x0, double p1, double p2, FunctionKind kind);

}  // namespace sensbound
