#include "sensbound/report.hpp"

#include <charconv>
#include <cstdio>
#include <stdexcept>

namespace sensbound {

OutputSpec::Format parse_format(const std::string& name) {
  if (name == "table") return OutputSpec::Format::table;
  if (name == "csv") return OutputSpec::Format::csv;
  if (name == "json") return OutputSpec::Format::json;
  throw std::invalid_argument("unknown output format '" + name + "'");
}

std::string format_shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_display(double v, int precision) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

std::string to_string(FunctionKind kind) {
  return kind == FunctionKind::linear ? "linear" : "hyperbolic";
}

std::string to_string(Quadrant quadrant) {
  switch (quadrant) {
    case Quadrant::I: return "I";
    case Quadrant::II: return "II";
    case Quadrant::III: return "III";
    case Quadrant::IV: return "IV";
  }
  return "?";
}

std::string to_string(RecordStatus status) {
  switch (status) {
    case RecordStatus::ok: return "ok";
    case RecordStatus::undefined_evidence: return "undefined";
    case RecordStatus::boundary_posterior: return "boundary";
  }
  return "?";
}

std::string to_string(UndefinedRegion region) {
  switch (region) {
    case UndefinedRegion::none: return "none";
    case UndefinedRegion::at_zero: return "x=0";
    case UndefinedRegion::at_one: return "x=1";
    case UndefinedRegion::everywhere: return "everywhere";
  }
  return "?";
}

namespace {

void csv_value(std::ostream& os, double v, int precision) {
  os << format_display(v, precision) << ',' << format_shortest(v);
}

constexpr const char* kSweepCsvColumns =
    "profile,status,pr_evidence,pr_evidence_raw,x0,x0_raw,p0,p0_raw,"
    "c1,c1_raw,c2,c2_raw,c3,c3_raw,c4,c4_raw,kind,structural_linear,"
    "sensitivity_value,sensitivity_value_raw,most_likely_state,"
    "exact_defined,exact_tie,exact_alpha,exact_alpha_raw,exact_beta,exact_beta_raw,"
    "bound_defined,bound_alpha,bound_alpha_raw,bound_beta,bound_beta_raw,"
    "bound_clamped_low,bound_clamped_high,containment_ok,max_violation,max_violation_raw";

void write_sweep_rows(std::ostream& os, const SweepResult& result, const DiscreteNetwork& net,
                      int precision, const std::string* label) {
  for (const auto& rec : result.records) {
    if (label) os << *label << ',';
    os << profile_to_string(rec.profile, net) << ',' << to_string(rec.status) << ',';
    csv_value(os, rec.evidence_probability, precision);
    os << ',';
    csv_value(os, rec.x0, precision);
    os << ',';
    csv_value(os, rec.p0, precision);
    os << ',';
    csv_value(os, rec.coeffs.c1, precision);
    os << ',';
    csv_value(os, rec.coeffs.c2, precision);
    os << ',';
    csv_value(os, rec.coeffs.c3, precision);
    os << ',';
    csv_value(os, rec.coeffs.c4, precision);
    os << ',' << to_string(rec.kind) << ',' << (rec.structurally_linear ? "true" : "false") << ',';
    csv_value(os, rec.sensitivity_value, precision);
    os << ',' << rec.most_likely_state << ',' << (rec.exact_defined ? "true" : "false") << ','
       << (rec.exact_deviation.tie ? "true" : "false") << ',';
    csv_value(os, rec.exact_deviation.alpha, precision);
    os << ',';
    csv_value(os, rec.exact_deviation.beta, precision);
    os << ',' << (rec.bound_defined ? "true" : "false") << ',';
    csv_value(os, rec.bound_deviation.alpha, precision);
    os << ',';
    csv_value(os, rec.bound_deviation.beta, precision);
    os << ',' << (rec.bound_deviation.clamped_low ? "true" : "false") << ','
       << (rec.bound_deviation.clamped_high ? "true" : "false") << ','
       << (rec.containment_ok ? "true" : "false") << ',';
    csv_value(os, rec.max_envelope_violation, precision);
    os << '\n';
  }
}

}  // namespace

void write_sweep_csv(std::ostream& os, const SweepResult& result, const DiscreteNetwork& net,
                     int precision) {
  os << kSweepCsvColumns << '\n';
  write_sweep_rows(os, result, net, precision, nullptr);
}

void write_sweeps_csv(std::ostream& os, std::span<const LabeledSweep> sweeps,
                      const DiscreteNetwork& net, int precision) {
  os << "parameter," << kSweepCsvColumns << '\n';
  for (const auto& [parameter, result] : sweeps)
    write_sweep_rows(os, result, net, precision, &parameter);
}

void write_sweeps_table(std::ostream& os, std::span<const LabeledSweep> sweeps,
                        const DiscreteNetwork& net, int precision) {
  for (const auto& [parameter, result] : sweeps) {
    os << "== parameter " << parameter << "\n";
    write_sweep_table(os, result, net, precision);
  }
}

ordered_json sweeps_to_json(std::span<const LabeledSweep> sweeps, const DiscreteNetwork& net) {
  ordered_json out = ordered_json::array();
  for (const auto& [parameter, result] : sweeps) {
    ordered_json entry;
    entry["parameter"] = parameter;
    ordered_json body = sweep_to_json(result, net);
    for (auto& [key, value] : body.items()) entry[key] = std::move(value);
    out.push_back(std::move(entry));
  }
  return out;
}

namespace {

ordered_json profile_json(const EvidenceProfile& profile, const DiscreteNetwork& net) {
  ordered_json obj = ordered_json::object();
  for (const auto& [name, state] : profile.observations())
    obj[name] = net.variable(net.require_index(name)).states[state];
  return obj;
}

ordered_json coefficients_json(const SensCoefficients& c) {
  return ordered_json{{"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"c4", c.c4}};
}

}  // namespace

ordered_json sweep_to_json(const SweepResult& result, const DiscreteNetwork& net) {
  ordered_json out;
  out["refused"] = result.refused;
  out["profile_count"] = result.profile_count;
  if (result.refused) return out;

  ordered_json records = ordered_json::array();
  for (const auto& rec : result.records) {
    ordered_json r;
    r["profile"] = profile_json(rec.profile, net);
    r["status"] = to_string(rec.status);
    r["pr_evidence"] = rec.evidence_probability;
    if (rec.status == RecordStatus::undefined_evidence) {
      records.push_back(std::move(r));
      continue;
    }
    r["x0"] = rec.x0;
    r["p0"] = rec.p0;
    r["coefficients"] = coefficients_json(rec.coeffs);
    ordered_json per_state = ordered_json::array();
    for (std::size_t k = 0; k < rec.state_coeffs.size(); ++k) {
      ordered_json s = coefficients_json(rec.state_coeffs[k]);
      s["p0"] = rec.state_p0[k];
      per_state.push_back(std::move(s));
    }
    r["states"] = std::move(per_state);
    r["kind"] = to_string(rec.kind);
    r["undefined_region"] = to_string(rec.undefined);
    r["structural_linear"] = rec.structurally_linear;
    r["sensitivity_value"] = rec.sensitivity_value;
    r["most_likely_state"] = rec.most_likely_state;
    r["exact_deviation"] =
        rec.exact_defined
            ? ordered_json{{"alpha", rec.exact_deviation.alpha},
                           {"beta", rec.exact_deviation.beta},
                           {"low", rec.exact_deviation.low},
                           {"high", rec.exact_deviation.high},
                           {"tie", rec.exact_deviation.tie}}
            : ordered_json(nullptr);
    r["bound_deviation"] =
        rec.bound_defined
            ? ordered_json{{"alpha", rec.bound_deviation.alpha},
                           {"beta", rec.bound_deviation.beta},
                           {"x_alpha", rec.bound_deviation.x_alpha},
                           {"x_beta", rec.bound_deviation.x_beta},
                           {"clamped_low", rec.bound_deviation.clamped_low},
                           {"clamped_high", rec.bound_deviation.clamped_high}}
            : ordered_json(nullptr);
    r["containment_ok"] = rec.containment_ok;
    r["max_envelope_violation"] = rec.max_envelope_violation;
    records.push_back(std::move(r));
  }
  out["records"] = std::move(records);

  const AggregateReport& agg = result.aggregate;
  ordered_json a;
  a["profile_count"] = agg.profile_count;
  a["undefined_count"] = agg.undefined_count;
  a["boundary_count"] = agg.boundary_count;
  a["worst_sensitivity_value"] = agg.worst_sensitivity_value;
  a["worst_profile"] = agg.worst_profile;
  a["min_alpha"] = agg.min_alpha_profile >= 0 ? ordered_json(agg.min_alpha) : ordered_json(nullptr);
  a["min_alpha_profile"] = agg.min_alpha_profile;
  a["min_beta"] = agg.min_beta_profile >= 0 ? ordered_json(agg.min_beta) : ordered_json(nullptr);
  a["min_beta_profile"] = agg.min_beta_profile;
  a["containment_violations"] = agg.containment_violations;
  a["structural_linear_count"] = agg.structural_linear_count;
  a["numeric_linear_count"] = agg.numeric_linear_count;
  out["aggregate"] = std::move(a);
  return out;
}

void write_sweep_table(std::ostream& os, const SweepResult& result, const DiscreteNetwork& net,
                       int precision) {
  if (result.refused) {
    os << "refused: " << result.profile_count << " profiles exceed the cap\n";
    return;
  }
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& rec = result.records[i];
    os << "[" << i << "] " << profile_to_string(rec.profile, net);
    if (rec.status == RecordStatus::undefined_evidence) {
      os << "  Pr(e)=0, undefined\n";
      continue;
    }
    os << "  Pr(e)=" << format_display(rec.evidence_probability, precision)
       << "  p0=" << format_display(rec.p0, precision) << "  " << to_string(rec.kind)
       << "  |f'(x0)|=" << format_display(rec.sensitivity_value, precision);
    if (rec.exact_defined)
      os << "  exact=(" << format_display(rec.exact_deviation.alpha, precision) << ","
         << format_display(rec.exact_deviation.beta, precision) << ")";
    if (rec.bound_defined)
      os << "  bound=(" << format_display(rec.bound_deviation.alpha, precision) << ","
         << format_display(rec.bound_deviation.beta, precision) << ")";
    os << (rec.containment_ok ? "" : "  CONTAINMENT VIOLATION") << "\n";
  }
  const auto& agg = result.aggregate;
  os << "profiles: " << agg.profile_count << " (" << agg.undefined_count << " undefined)\n";
  if (agg.worst_profile >= 0)
    os << "worst sensitivity value: " << format_display(agg.worst_sensitivity_value, precision)
       << " at record " << agg.worst_profile << "\n";
  if (agg.min_alpha_profile >= 0)
    os << "minimum bound deviation: (" << format_display(agg.min_alpha, precision) << ","
       << format_display(agg.min_beta, precision) << ") at records (" << agg.min_alpha_profile
       << "," << agg.min_beta_profile << ")\n";
  os << "containment violations: " << agg.containment_violations.size() << "\n";
}

ordered_json verify_to_json(const VerifyReport& report) {
  ordered_json out;
  out["verdict"] = report.pass ? "PASS" : "FAIL";
  out["parameters_checked"] = report.parameters_checked;
  out["parameters_skipped"] = report.skips.size();
  out["profiles_total"] = report.profiles_total;
  out["undefined_profiles"] = report.undefined_profiles;
  out["max_envelope_violation"] = report.max_envelope_violation;
  out["max_delta_equivalence_gap"] = report.max_delta_equivalence_gap;
  out["max_numerator_identity_gap"] = report.max_numerator_identity_gap;
  out["max_closed_vs_intersection_gap"] = report.max_closed_vs_intersection_gap;

  ordered_json skips = ordered_json::array();
  for (const auto& s : report.skips)
    skips.push_back({{"parameter", s.parameter}, {"x0", s.x0}, {"reason", s.reason}});
  out["skips"] = std::move(skips);

  ordered_json findings = ordered_json::array();
  for (const auto& f : report.findings)
    findings.push_back({{"kind", f.kind},
                        {"parameter", f.parameter},
                        {"profile", f.profile},
                        {"magnitude", f.magnitude},
                        {"detail", f.detail}});
  out["findings"] = std::move(findings);

  ordered_json params = ordered_json::array();
  for (const auto& p : report.parameters)
    params.push_back({{"parameter", p.parameter},
                      {"x0", p.x0},
                      {"structural_linear", p.structurally_linear},
                      {"profiles", p.profiles},
                      {"undefined", p.undefined},
                      {"linear_records", p.linear_records},
                      {"worst_sensitivity_value", p.worst_sensitivity_value},
                      {"min_bound_alpha", p.min_bound_alpha},
                      {"min_bound_beta", p.min_bound_beta},
                      {"max_envelope_violation", p.max_envelope_violation}});
  out["parameters"] = std::move(params);
  return out;
}

void write_verify_table(std::ostream& os, const VerifyReport& report, int precision) {
  os << "verdict: " << (report.pass ? "PASS" : "FAIL") << "\n"
     << "parameters checked: " << report.parameters_checked
     << " (skipped: " << report.skips.size() << ")\n"
     << "profiles: " << report.profiles_total << " (" << report.undefined_profiles
     << " undefined)\n"
     << "max envelope violation: " << format_display(report.max_envelope_violation, precision)
     << "\n"
     << "max envelope/log-odds gap: "
     << format_display(report.max_delta_equivalence_gap, precision) << "\n"
     << "max numerator identity gap: "
     << format_display(report.max_numerator_identity_gap, precision) << "\n"
     << "max closed-form/oracle gap: "
     << format_display(report.max_closed_vs_intersection_gap, precision) << "\n";
  for (const auto& s : report.skips)
    os << "skip: " << s.parameter << " (x0=" << format_display(s.x0, precision) << ", "
       << s.reason << ")\n";
  if (!report.findings.empty()) {
    os << "findings:\n";
    for (const auto& f : report.findings)
      os << "  [" << f.kind << "] " << f.parameter << " @ " << f.profile << " magnitude "
         << format_display(f.magnitude, precision) << ": " << f.detail << "\n";
  }
}

}  // namespace sensbound
