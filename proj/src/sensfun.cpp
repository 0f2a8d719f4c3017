#include "sensbound/sensfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sensbound {

namespace {

constexpr double kCoefficientSlack = 1e-9;

void check_probability_bounds(const std::string& what, double at_zero, double at_one) {
  if (at_zero < -kCoefficientSlack || at_zero > 1.0 + kCoefficientSlack ||
      at_one < -kCoefficientSlack || at_one > 1.0 + kCoefficientSlack)
    throw std::logic_error("derived " + what + " endpoints escape [0, 1]");
}

}  // namespace

std::vector<SensitivityFunction> derive_state_functions(const DiscreteNetwork& net,
                                                        const std::string& variable,
                                                        const EvidenceProfile& evidence,
                                                        const ParameterRef& pref, Engine engine) {
  const double x0 = parameter_value(net, pref);
  if (!(x0 > 0.0 && x0 < 1.0))
    throw std::domain_error("parameter '" + pref.node + "' has original value " +
                            std::to_string(x0) +
                            "; analysis assumes 0 < x0 < 1");

  const DiscreteNetwork at_zero = apply_parameter(net, pref, 0.0);
  const DiscreteNetwork at_one = apply_parameter(net, pref, 1.0);
  const auto [n0, d0] = state_joints(at_zero, variable, evidence, engine);
  const auto [n1, d1] = state_joints(at_one, variable, evidence, engine);
  const auto [nx, dx] = state_joints(net, variable, evidence, engine);

  check_probability_bounds("denominator", d0, d1);

  UndefinedRegion undefined = UndefinedRegion::none;
  if (d0 == 0.0 && d1 == 0.0)
    undefined = UndefinedRegion::everywhere;
  else if (d0 == 0.0)
    undefined = UndefinedRegion::at_zero;
  else if (d1 == 0.0)
    undefined = UndefinedRegion::at_one;

  const double c4 = d0;
  const double c3 = d1 - d0;
  // A denominator vanishing at an endpoint forces the numerators to vanish
  // there too, leaving a constant function on the defined region.
  FunctionKind kind;
  if (undefined != UndefinedRegion::none)
    kind = FunctionKind::linear;
  else
    kind = (std::abs(c3) <= kLinearityEpsilon * std::max(std::abs(d0), std::abs(d1)))
               ? FunctionKind::linear
               : FunctionKind::hyperbolic;

  std::vector<SensitivityFunction> out;
  out.reserve(n0.size());
  for (std::size_t k = 0; k < n0.size(); ++k) {
    check_probability_bounds("numerator", n0[k], n1[k]);
    if (n0[k] > d0 + kCoefficientSlack || n1[k] > d1 + kCoefficientSlack)
      throw std::logic_error("derived numerator exceeds the denominator");

    SensitivityFunction f;
    f.coeffs = {n1[k] - n0[k], n0[k], c3, c4};
    f.x0 = x0;
    f.kind = kind;
    f.undefined = undefined;
    f.p0 = dx > 0.0 ? nx[k] / dx : std::numeric_limits<double>::quiet_NaN();
    if (dx > 0.0) {
      const double anchored = (f.coeffs.c1 * x0 + f.coeffs.c2) / (c3 * x0 + c4);
      if (std::abs(anchored - f.p0) > 1e-9)
        throw std::logic_error("sensitivity function fails to reproduce the inferred probability at x0");
    }
    out.push_back(std::move(f));
  }
  return out;
}

SensitivityFunction derive_sensitivity(const DiscreteNetwork& net,
                                       const std::pair<std::string, int>& target,
                                       const EvidenceProfile& evidence, const ParameterRef& pref,
                                       Engine engine) {
  int var = net.require_index(target.first);
  if (target.second < 0 || target.second >= net.variable(var).arity())
    throw std::out_of_range("target state index " + std::to_string(target.second) +
                            " out of range for '" + target.first + "'");
  auto all = derive_state_functions(net, target.first, evidence, pref, engine);
  return all[target.second];
}

std::optional<double> evaluate(const SensitivityFunction& f, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("sensitivity functions are defined on [0, 1]");
  switch (f.undefined) {
    case UndefinedRegion::everywhere:
      return std::nullopt;
    case UndefinedRegion::at_zero:
      if (x == 0.0) return std::nullopt;
      break;
    case UndefinedRegion::at_one:
      if (x == 1.0) return std::nullopt;
      break;
    case UndefinedRegion::none:
      break;
  }
  return (f.coeffs.c1 * x + f.coeffs.c2) / (f.coeffs.c3 * x + f.coeffs.c4);
}

HyperbolaForm to_hyperbola(const SensitivityFunction& f) {
  if (f.kind != FunctionKind::hyperbolic)
    throw std::invalid_argument("linear sensitivity function has no hyperbola form");
  const auto& c = f.coeffs;
  HyperbolaForm h;
  h.s = -c.c4 / c.c3;
  h.t = c.c1 / c.c3;
  h.r = (c.c2 * c.c3 - c.c1 * c.c4) / (c.c3 * c.c3);
  if (h.s >= 0.0 && h.s <= 1.0)
    throw std::logic_error("hyperbolic sensitivity function with vertical asymptote inside [0, 1]");
  if (h.r > 0.0)
    h.quadrant = h.s < 0.0 ? Quadrant::I : Quadrant::III;
  else
    h.quadrant = h.s < 0.0 ? Quadrant::IV : Quadrant::II;
  return h;
}

double sensitivity_value(const SensitivityFunction& f) {
  if (f.undefined == UndefinedRegion::everywhere)
    throw std::domain_error("sensitivity function undefined everywhere");
  const auto& c = f.coeffs;
  const double denom = c.c3 * f.x0 + c.c4;
  return std::abs(c.c1 * c.c4 - c.c2 * c.c3) / (denom * denom);
}

AdmissibleDeviation deviation_from_numerators(const std::vector<SensCoefficients>& state_coeffs,
                                              double x0) {
  if (state_coeffs.size() < 2)
    throw std::invalid_argument("need at least two states to compare");

  int best = 0;
  double best_value = -1.0;
  bool tie = false;
  for (std::size_t k = 0; k < state_coeffs.size(); ++k) {
    double v = state_coeffs[k].c1 * x0 + state_coeffs[k].c2;
    if (v > best_value) {
      best_value = v;
      best = static_cast<int>(k);
      tie = false;
    } else if (v == best_value) {
      tie = true;
    }
  }

  AdmissibleDeviation dev;
  dev.most_likely_state = best;
  if (tie) {
    dev.tie = true;
    dev.low = dev.high = x0;
    return dev;
  }

  double below = 0.0, above = 1.0;
  const auto& win = state_coeffs[best];
  for (std::size_t k = 0; k < state_coeffs.size(); ++k) {
    if (static_cast<int>(k) == best) continue;
    const double dslope = win.c1 - state_coeffs[k].c1;
    if (dslope == 0.0) continue;  // parallel numerators never cross
    const double xc = (state_coeffs[k].c2 - win.c2) / dslope;
    if (xc < 0.0 || xc > 1.0) continue;
    if (xc < x0)
      below = std::max(below, xc);
    else if (xc > x0)
      above = std::min(above, xc);
  }
  dev.low = below;
  dev.high = above;
  dev.alpha = x0 - below;
  dev.beta = above - x0;
  return dev;
}

AdmissibleDeviation exact_admissible_deviation(const DiscreteNetwork& net,
                                               const std::string& variable,
                                               const EvidenceProfile& evidence,
                                               const ParameterRef& pref, Engine engine) {
  auto fs = derive_state_functions(net, variable, evidence, pref, engine);
  if (fs.front().undefined != UndefinedRegion::none)
    throw std::domain_error("evidence probability vanishes on [0, 1]; posterior ordering undefined");
  std::vector<SensCoefficients> coeffs;
  coeffs.reserve(fs.size());
  for (const auto& f : fs) coeffs.push_back(f.coeffs);
  return deviation_from_numerators(coeffs, fs.front().x0);
}

}  // namespace sensbound
