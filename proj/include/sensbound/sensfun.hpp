#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sensbound/inference.hpp"
#include "sensbound/network.hpp"

namespace sensbound {

/// Relative threshold under which the denominator gradient c3 counts as a
/// structural zero and the function as linear.
inline constexpr double kLinearityEpsilon = 1e-9;

/// The probability of interest as a function of one parameter x under
/// proportional co-variation is N(x)/D(x) with N(x) = Pr(target, e)(x) =
/// c1*x + c2 and D(x) = Pr(e)(x) = c3*x + c4. The coefficients are kept as
/// these literal probabilities, never rescaled, so that the per-state
/// numerators sum to the shared denominator coefficientwise.
struct SensCoefficients {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
};

enum class FunctionKind { linear, hyperbolic };

enum class Quadrant { I, II, III, IV };

/// Rectangular-hyperbola form r/(x - s) + t. For a valid sensitivity
/// function the vertical asymptote lies outside the unit interval (s < 0 or
/// s > 1); the quadrant names the branch relative to the asymptotes.
struct HyperbolaForm {
  double r = 0.0, s = 0.0, t = 0.0;
  Quadrant quadrant = Quadrant::I;
};

/// Zero set of the denominator Pr(e)(x) on [0, 1]. D is linear and
/// nonnegative there, so the set is empty, one endpoint, or everything.
enum class UndefinedRegion { none, at_zero, at_one, everywhere };

struct SensitivityFunction {
  SensCoefficients coeffs;
  double x0 = 0.0;  // original parameter value
  double p0 = 0.0;  // original probability of interest; NaN when everywhere-undefined
  FunctionKind kind = FunctionKind::linear;
  UndefinedRegion undefined = UndefinedRegion::none;
};

/// Derives the sensitivity function for (target, evidence, parameter) by
/// evaluating N and D at x = 0 and x = 1 (two co-varied networks fully
/// determine the four constants since both are linear in x). Requires
/// 0 < x0 < 1. The target variable may be the parameter's own node but must
/// be unobserved.
SensitivityFunction derive_sensitivity(const DiscreteNetwork& net,
                                       const std::pair<std::string, int>& target,
                                       const EvidenceProfile& evidence, const ParameterRef& pref,
                                       Engine engine = Engine::enumeration);

/// One function per state of `variable`, all sharing the denominator.
std::vector<SensitivityFunction> derive_state_functions(const DiscreteNetwork& net,
                                                        const std::string& variable,
                                                        const EvidenceProfile& evidence,
                                                        const ParameterRef& pref,
                                                        Engine engine = Engine::enumeration);

/// f(x), or nullopt when x falls in the undefined region. Requires x in [0, 1].
std::optional<double> evaluate(const SensitivityFunction& f, double x);

/// Conversion to r/(x - s) + t. Throws std::invalid_argument on linear input.
HyperbolaForm to_hyperbola(const SensitivityFunction& f);

/// |f'(x0)|.
double sensitivity_value(const SensitivityFunction& f);

/// Largest safe shifts (alpha to smaller, beta to larger values) that keep
/// the most likely state of the variable of interest unchanged; the closed
/// interval [x0 - alpha, x0 + beta] runs up to the nearest crossing of the
/// winning numerator (values tied at a crossing do not yet change the
/// winner) or to the unit-interval boundary.
struct AdmissibleDeviation {
  double alpha = 0.0, beta = 0.0;
  double low = 0.0, high = 0.0;  // [x0 - alpha, x0 + beta]
  int most_likely_state = -1;
  bool tie = false;  // most likely state not unique at x0
};

AdmissibleDeviation exact_admissible_deviation(const DiscreteNetwork& net,
                                               const std::string& variable,
                                               const EvidenceProfile& evidence,
                                               const ParameterRef& pref,
                                               Engine engine = Engine::enumeration);

/// The crossing computation behind exact_admissible_deviation, operating on
/// numerators over a shared positive denominator (argmax of the posteriors
/// equals argmax of the numerators). Exposed for subset checks.
AdmissibleDeviation deviation_from_numerators(const std::vector<SensCoefficients>& state_coeffs,
                                              double x0);

}  // namespace sensbound
