#include "sensbound/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sensbound {

namespace {

std::vector<double> simplex_row(Rng& rng, int arity, double margin) {
  std::vector<double> row(arity);
  double sum = 0.0;
  for (double& e : row) {
    e = -std::log1p(-rng.uniform());
    sum += e;
  }
  if (sum == 0.0) {
    std::fill(row.begin(), row.end(), 1.0 / arity);
    sum = 1.0;
  }
  const double shrink = 1.0 - margin * arity;
  for (double& e : row) e = shrink * (e / sum) + margin;
  return row;
}

long grid_point_count(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5))
    throw std::invalid_argument("grid step must lie in (0, 0.5]");
  return std::lround(1.0 / grid_step);
}

}  // namespace

DiscreteNetwork random_network(Rng& rng, const NetworkGenOptions& options) {
  const int n = rng.uniform_int(options.min_nodes, options.max_nodes);

  std::vector<Variable> vars(n);
  for (int i = 0; i < n; ++i) {
    vars[i].name = "X" + std::to_string(i + 1);
    const int arity = rng.uniform_int(options.min_arity, options.max_arity);
    for (int s = 0; s < arity; ++s) vars[i].states.push_back("s" + std::to_string(s + 1));
  }

  // Variables are generated in topological order; edges only run forward.
  std::vector<std::vector<int>> parents(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (rng.uniform() < options.edge_probability) parents[j].push_back(i);

  std::vector<std::vector<std::vector<double>>> cpts(n);
  for (int j = 0; j < n; ++j) {
    std::uint64_t rows = 1;
    for (int p : parents[j]) rows *= vars[p].arity();
    for (std::uint64_t r = 0; r < rows; ++r)
      cpts[j].push_back(simplex_row(rng, vars[j].arity(), options.boundary_margin));
  }
  return DiscreteNetwork(std::move(vars), std::move(parents), std::move(cpts));
}

bool structural_linear(const DiscreteNetwork& net, const ParameterRef& pref,
                       std::span<const std::string> evidence_vars) {
  const int node = net.resolve(pref).node;
  for (const auto& name : evidence_vars)
    if (net.is_descendant(node, net.require_index(name))) return false;
  return true;
}

SweepResult sweep(const DiscreteNetwork& net, const std::pair<std::string, int>& target,
                  std::span<const std::string> observables, const ParameterRef& pref,
                  const SweepOptions& options) {
  const int target_var = net.require_index(target.first);
  if (target.second < 0 || target.second >= net.variable(target_var).arity())
    throw std::out_of_range("target state index out of range for '" + target.first + "'");
  for (const auto& name : observables)
    if (name == target.first)
      throw std::invalid_argument("target variable '" + name + "' cannot be observed");

  const double x0 = parameter_value(net, pref);
  const bool slinear = structural_linear(net, pref, observables);

  SweepResult result;
  ProfileEnumeration profiles = enumerate_profiles(net, observables, options.profile_cap);
  result.profile_count = profiles.count;
  if (!profiles.materialized) {
    result.refused = true;
    return result;
  }

  const long grid_n = grid_point_count(options.grid_step);

  for (auto& profile : profiles.profiles) {
    ProfileRecord rec;
    rec.profile = std::move(profile);
    rec.x0 = x0;
    rec.structurally_linear = slinear;

    auto fs = derive_state_functions(net, target.first, rec.profile, pref, options.engine);
    rec.undefined = fs.front().undefined;
    rec.state_coeffs.reserve(fs.size());
    rec.state_p0.reserve(fs.size());
    for (const auto& f : fs) {
      rec.state_coeffs.push_back(f.coeffs);
      rec.state_p0.push_back(f.p0);
    }
    const SensCoefficients& d = fs.front().coeffs;
    rec.evidence_probability = d.c3 * x0 + d.c4;

    if (rec.undefined == UndefinedRegion::everywhere) {
      rec.status = RecordStatus::undefined_evidence;
      rec.evidence_probability = 0.0;
      result.records.push_back(std::move(rec));
      continue;
    }

    const SensitivityFunction& f = fs[target.second];
    rec.coeffs = f.coeffs;
    rec.kind = f.kind;
    rec.p0 = f.p0;
    rec.sensitivity_value = sensitivity_value(f);

    if (rec.undefined == UndefinedRegion::none) {
      rec.exact_deviation = deviation_from_numerators(rec.state_coeffs, x0);
      rec.exact_defined = true;
      rec.most_likely_state = rec.exact_deviation.most_likely_state;
    } else {
      // Denominator vanishes at an endpoint; the posterior ordering is not
      // defined over all of [0, 1], so only the anchor argmax is reported.
      rec.most_likely_state = static_cast<int>(
          std::max_element(rec.state_p0.begin(), rec.state_p0.end()) - rec.state_p0.begin());
    }

    const double p1 = rec.state_p0[rec.most_likely_state];
    std::vector<double> competitors;
    for (std::size_t k = 0; k < rec.state_p0.size(); ++k)
      if (static_cast<int>(k) != rec.most_likely_state && rec.state_p0[k] > 0.0)
        competitors.push_back(rec.state_p0[k]);
    if (p1 > 0.0 && p1 < 1.0 && !competitors.empty()) {
      rec.bound_deviation = min_deviation_nary(
          x0, p1, competitors, slinear ? FunctionKind::linear : FunctionKind::hyperbolic);
      rec.bound_defined = true;
    }

    if (!(rec.p0 > 0.0 && rec.p0 < 1.0)) {
      rec.status = RecordStatus::boundary_posterior;
      result.records.push_back(std::move(rec));
      continue;
    }

    HyperbolicEnvelope env = hyperbolic_envelope(x0, rec.p0);
    if (options.fault_t_shift != 0.0) {
      env.increasing.t_shift = options.fault_t_shift;
      env.decreasing.t_shift = options.fault_t_shift;
    }
    LinearEnvelope lenv;
    if (slinear) lenv = linear_envelope(x0, rec.p0);

    double violation = 0.0;
    for (long i = 0; i <= grid_n; ++i) {
      const double x = static_cast<double>(i) / grid_n;
      const auto fx = evaluate(f, x);
      if (!fx) continue;
      auto [lo, hi] = envelope_bounds_at(env, x);
      violation = std::max({violation, lo - *fx, *fx - hi});
      if (slinear) {
        auto [llo, lhi] = envelope_bounds_at(lenv, x);
        violation = std::max({violation, llo - *fx, *fx - lhi});
      }
    }
    rec.max_envelope_violation = violation;
    rec.containment_ok = violation <= kContainmentTolerance;

    result.records.push_back(std::move(rec));
  }

  AggregateReport& agg = result.aggregate;
  agg.profile_count = result.records.size();
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const ProfileRecord& rec = result.records[i];
    if (rec.status == RecordStatus::undefined_evidence) {
      ++agg.undefined_count;
      continue;
    }
    if (rec.status == RecordStatus::boundary_posterior) {
      ++agg.boundary_count;
      continue;
    }
    if (rec.sensitivity_value > agg.worst_sensitivity_value || agg.worst_profile < 0) {
      agg.worst_sensitivity_value = rec.sensitivity_value;
      agg.worst_profile = static_cast<long>(i);
    }
    if (rec.bound_defined) {
      if (rec.bound_deviation.alpha < agg.min_alpha) {
        agg.min_alpha = rec.bound_deviation.alpha;
        agg.min_alpha_profile = static_cast<long>(i);
      }
      if (rec.bound_deviation.beta < agg.min_beta) {
        agg.min_beta = rec.bound_deviation.beta;
        agg.min_beta_profile = static_cast<long>(i);
      }
    }
    if (!rec.containment_ok) agg.containment_violations.push_back(static_cast<long>(i));
    if (rec.kind == FunctionKind::linear) ++agg.numeric_linear_count;
    if (rec.structurally_linear) ++agg.structural_linear_count;
  }
  return result;
}

VerifyPlan default_verify_plan(const DiscreteNetwork& net) {
  VerifyPlan plan;
  plan.target = {net.variable(0).name, 0};
  const int n = net.node_count();
  for (int i = n - 1; i >= 1 && plan.observables.size() < 3; --i)
    plan.observables.push_back(net.variable(i).name);
  std::reverse(plan.observables.begin(), plan.observables.end());
  return plan;
}

std::string parameter_to_string(const DiscreteNetwork& net, const ParameterRef& pref) {
  const auto [node, row, state] = net.resolve(pref);
  std::ostringstream os;
  os << pref.node << ':' << net.variable(node).states[state];
  const auto& parents = net.parents(node);
  for (std::size_t i = 0; i < parents.size(); ++i) {
    os << (i == 0 ? '|' : ',') << net.variable(parents[i]).name << '='
       << net.variable(parents[i]).states[pref.parent_states[i]];
  }
  return os.str();
}

namespace {

int parse_state_token(const Variable& var, const std::string& token) {
  int idx = var.state_index(token);
  if (idx >= 0) return idx;
  try {
    std::size_t used = 0;
    idx = std::stoi(token, &used);
    if (used == token.size() && idx >= 0 && idx < var.arity()) return idx;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("'" + token + "' names no state of variable '" + var.name + "'");
}

}  // namespace

ParameterRef parse_parameter(const DiscreteNetwork& net, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("parameter must look like NODE:STATE|P1=s1,P2=s2");
  ParameterRef pref;
  pref.node = text.substr(0, colon);
  const int node = net.require_index(pref.node);

  const auto pipe = text.find('|', colon + 1);
  const std::string state_token =
      text.substr(colon + 1, pipe == std::string::npos ? std::string::npos : pipe - colon - 1);
  pref.state_index = parse_state_token(net.variable(node), state_token);

  const auto& parents = net.parents(node);
  std::vector<int> states(parents.size(), -1);
  if (pipe != std::string::npos) {
    std::stringstream rest(text.substr(pipe + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("parent assignment '" + item + "' must look like PARENT=STATE");
      const std::string pname = item.substr(0, eq);
      auto it = std::find_if(parents.begin(), parents.end(),
                             [&](int p) { return net.variable(p).name == pname; });
      if (it == parents.end())
        throw std::invalid_argument("'" + pname + "' is not a parent of '" + pref.node + "'");
      states[it - parents.begin()] = parse_state_token(net.variable(*it), item.substr(eq + 1));
    }
  }
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (states[i] < 0)
      throw std::invalid_argument("missing assignment for parent '" +
                                  net.variable(parents[i]).name + "' of '" + pref.node + "'");
    pref.parent_states.push_back(states[i]);
  }
  return pref;
}

std::string profile_to_string(const EvidenceProfile& profile, const DiscreteNetwork& net) {
  if (profile.empty()) return "(none)";
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, state] : profile.observations()) {
    if (!first) os << ',';
    os << name << '=' << net.variable(net.require_index(name)).states[state];
    first = false;
  }
  return os.str();
}

namespace {

constexpr double kSoundnessTolerance = 1e-9;
constexpr double kEquivalenceTolerance = 1e-12;
constexpr double kIdentityTolerance = 1e-12;
constexpr double kOracleTolerance = 1e-9;

}  // namespace

VerifyReport verify_network(const DiscreteNetwork& net, const std::pair<std::string, int>& target,
                            std::span<const std::string> observables,
                            const SweepOptions& options) {
  VerifyReport report;

  {
    ProfileEnumeration probe = enumerate_profiles(net, observables, options.profile_cap);
    if (!probe.materialized)
      throw std::invalid_argument("profile cap exceeded: " + std::to_string(probe.count) +
                                  " profiles");
  }
  const long grid_n = grid_point_count(options.grid_step);

  auto add_finding = [&](std::string kind, const std::string& parameter,
                         const std::string& profile, double magnitude, std::string detail) {
    report.findings.push_back(
        {std::move(kind), parameter, profile, std::move(detail), magnitude});
  };

  for (int node = 0; node < net.node_count(); ++node) {
    for (int row = 0; row < net.row_count(node); ++row) {
      for (int state = 0; state < net.variable(node).arity(); ++state) {
        ParameterRef pref{net.variable(node).name, state, net.row_config(node, row)};
        const std::string pname = parameter_to_string(net, pref);
        const double x0 = net.cpt(node)[row][state];
        if (x0 < 0.01 || x0 > 0.99) {
          report.skips.push_back(
              {pname, x0,
               (x0 == 0.0 || x0 == 1.0) ? "deterministic entry" : "within 0.01 of the boundary"});
          continue;
        }

        SweepResult sr = sweep(net, target, observables, pref, options);
        ++report.parameters_checked;
        report.profiles_total += sr.aggregate.profile_count;
        report.undefined_profiles += sr.aggregate.undefined_count;

        ParameterSummary summary;
        summary.parameter = pname;
        summary.x0 = x0;
        summary.profiles = sr.aggregate.profile_count;
        summary.undefined = sr.aggregate.undefined_count;
        summary.linear_records = sr.aggregate.numeric_linear_count;
        summary.worst_sensitivity_value = sr.aggregate.worst_sensitivity_value;
        summary.min_bound_alpha =
            sr.aggregate.min_alpha_profile >= 0 ? sr.aggregate.min_alpha : 0.0;
        summary.min_bound_beta = sr.aggregate.min_beta_profile >= 0 ? sr.aggregate.min_beta : 0.0;

        for (const ProfileRecord& rec : sr.records) {
          if (rec.status != RecordStatus::ok) continue;
          const std::string pstr = profile_to_string(rec.profile, net);
          summary.structurally_linear = rec.structurally_linear;
          summary.max_envelope_violation =
              std::max(summary.max_envelope_violation, rec.max_envelope_violation);
          report.max_envelope_violation =
              std::max(report.max_envelope_violation, rec.max_envelope_violation);

          if (!rec.containment_ok)
            add_finding("envelope_containment", pname, pstr, rec.max_envelope_violation,
                        "sensitivity function escapes the envelope");

          if (rec.structurally_linear && rec.kind != FunctionKind::linear)
            add_finding("structural_linearity", pname, pstr, std::abs(rec.coeffs.c3),
                        "structurally linear parameter derived as hyperbolic");

          {
            double sum_c1 = 0.0, sum_c2 = 0.0;
            for (const auto& c : rec.state_coeffs) {
              sum_c1 += c.c1;
              sum_c2 += c.c2;
            }
            const double gap = std::max(std::abs(sum_c1 - rec.coeffs.c3),
                                        std::abs(sum_c2 - rec.coeffs.c4));
            report.max_numerator_identity_gap = std::max(report.max_numerator_identity_gap, gap);
            if (gap > kIdentityTolerance)
              add_finding("numerator_completeness", pname, pstr, gap,
                          "state numerators do not sum to the denominator");
          }

          {
            const HyperbolicEnvelope env = hyperbolic_envelope(x0, rec.p0);
            double gap = 0.0;
            for (long i = 0; i <= grid_n; ++i) {
              const double x = static_cast<double>(i) / grid_n;
              const auto [lo, hi] = envelope_bounds_at(env, x);
              const DeltaBounds db = delta_bound(x0, rec.p0, x);
              gap = std::max({gap, std::abs(lo - db.lower), std::abs(hi - db.upper)});
            }
            report.max_delta_equivalence_gap = std::max(report.max_delta_equivalence_gap, gap);
            if (gap > kEquivalenceTolerance)
              add_finding("delta_equivalence", pname, pstr, gap,
                          "envelope and log-odds bounds disagree");
          }

          {
            const double bound = sensitivity_value_bound(x0, rec.p0);
            if (rec.sensitivity_value > bound + kSoundnessTolerance)
              add_finding("sensitivity_value_bound", pname, pstr, rec.sensitivity_value - bound,
                          "sensitivity value exceeds its closed-form bound");
            if (rec.structurally_linear) {
              const double lbound = linear_sensitivity_value_bound(x0, rec.p0);
              if (rec.sensitivity_value > lbound + kSoundnessTolerance)
                add_finding("sensitivity_value_bound", pname, pstr,
                            rec.sensitivity_value - lbound,
                            "sensitivity value exceeds the linear bound");
            }
          }

          if (rec.exact_defined && rec.bound_defined) {
            if (rec.bound_deviation.alpha > rec.exact_deviation.alpha + kSoundnessTolerance ||
                rec.bound_deviation.beta > rec.exact_deviation.beta + kSoundnessTolerance)
              add_finding("deviation_soundness", pname, pstr,
                          std::max(rec.bound_deviation.alpha - rec.exact_deviation.alpha,
                                   rec.bound_deviation.beta - rec.exact_deviation.beta),
                          "bound deviation exceeds the exact admissible deviation");
          }

          if (rec.exact_defined && rec.bound_defined && !rec.exact_deviation.tie) {
            const FunctionKind kind = rec.structurally_linear ? FunctionKind::linear
                                                              : FunctionKind::hyperbolic;
            const auto pairwise = kind == FunctionKind::linear
                                      ? min_admissible_deviation_linear
                                      : min_admissible_deviation_hyperbolic;
            const int win = rec.most_likely_state;
            const double p1 = rec.state_p0[win];
            for (std::size_t k = 0; k < rec.state_p0.size(); ++k) {
              if (static_cast<int>(k) == win || rec.state_p0[k] <= 0.0) continue;
              const DeviationBound pair_bound = pairwise(x0, p1, rec.state_p0[k]);
              const DeviationBound pair_oracle =
                  deviation_by_intersection(x0, p1, rec.state_p0[k], kind);
              const double oracle_gap =
                  std::max(std::abs(pair_bound.alpha - pair_oracle.alpha),
                           std::abs(pair_bound.beta - pair_oracle.beta));
              report.max_closed_vs_intersection_gap =
                  std::max(report.max_closed_vs_intersection_gap, oracle_gap);
              if (oracle_gap > kOracleTolerance)
                add_finding("closed_form_oracle", pname, pstr, oracle_gap,
                            "closed form disagrees with the intersection oracle");

              const AdmissibleDeviation pair_exact = deviation_from_numerators(
                  {rec.state_coeffs[win], rec.state_coeffs[k]}, x0);
              if (pair_bound.alpha > pair_exact.alpha + kSoundnessTolerance ||
                  pair_bound.beta > pair_exact.beta + kSoundnessTolerance)
                add_finding("deviation_soundness", pname, pstr,
                            std::max(pair_bound.alpha - pair_exact.alpha,
                                     pair_bound.beta - pair_exact.beta),
                            "pairwise bound exceeds the pairwise exact deviation");
            }
          }
        }
        report.parameters.push_back(std::move(summary));
      }
    }
  }
  report.pass = report.findings.empty();
  return report;
}

}  // namespace sensbound
