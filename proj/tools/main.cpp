#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sensbound/envelope.hpp"
#include "sensbound/errors.hpp"
#include "sensbound/inference.hpp"
#include "sensbound/network.hpp"
#include "sensbound/report.hpp"
#include "sensbound/sensfun.hpp"
#include "sensbound/sweep.hpp"

using namespace sensbound;

namespace {

// Destination stream per OutputSpec; "-" is standard output.
class Output {
 public:
  explicit Output(const std::string& destination) {
    if (destination != "-") {
      file_.open(destination, std::ios::binary);
      if (!file_) throw IoError("cannot write '" + destination + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::pair<std::string, int> parse_target(const DiscreteNetwork& net, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("target must look like VARIABLE=STATE");
  const std::string name = text.substr(0, eq);
  const Variable& var = net.variable(net.require_index(name));
  const std::string state = text.substr(eq + 1);
  int idx = var.state_index(state);
  if (idx < 0) {
    try {
      std::size_t used = 0;
      idx = std::stoi(state, &used);
      if (used != state.size() || idx < 0 || idx >= var.arity()) idx = -1;
    } catch (const std::exception&) {
      idx = -1;
    }
  }
  if (idx < 0)
    throw std::invalid_argument("'" + state + "' names no state of variable '" + name + "'");
  return {name, idx};
}

EvidenceProfile parse_evidence(const DiscreteNetwork& net, const std::vector<std::string>& items) {
  EvidenceProfile profile;
  for (const auto& raw : items) {
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      auto [name, state] = parse_target(net, item);
      profile.observe(name, state);
    }
  }
  validate_evidence(net, profile);
  return profile;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

Engine parse_engine(const std::string& name) {
  if (name == "enumeration") return Engine::enumeration;
  if (name == "elimination") return Engine::variable_elimination;
  throw std::invalid_argument("unknown engine '" + name + "' (use enumeration or elimination)");
}

void csv_pair(std::ostream& os, double v, int precision) {
  os << format_display(v, precision) << ',' << format_shortest(v);
}

// ---------------------------------------------------------------------------

struct SensfunArgs {
  std::string network, target, param;
  std::vector<std::string> evidence;
  std::string engine = "enumeration";
  int samples = 0;
  std::string format = "table", output = "-";
  int precision = 6;
};

int run_sensfun(const SensfunArgs& args) {
  DiscreteNetwork net = load_network_file(args.network);
  const auto target = parse_target(net, args.target);
  const EvidenceProfile evidence = parse_evidence(net, args.evidence);
  const ParameterRef pref = parse_parameter(net, args.param);
  SensitivityFunction f =
      derive_sensitivity(net, target, evidence, pref, parse_engine(args.engine));

  Output out(args.output);
  std::ostream& os = out.stream();
  const auto fmt = parse_format(args.format);
  const int prec = args.precision;

  std::vector<std::pair<double, std::optional<double>>> curve;
  if (args.samples >= 2)
    for (int i = 0; i < args.samples; ++i) {
      const double x = static_cast<double>(i) / (args.samples - 1);
      curve.emplace_back(x, evaluate(f, x));
    }

  if (fmt == OutputSpec::Format::json) {
    ordered_json j;
    j["parameter"] = parameter_to_string(net, pref);
    j["target"] = args.target;
    j["evidence"] = profile_to_string(evidence, net);
    j["x0"] = f.x0;
    j["p0"] = f.p0;
    j["c1"] = f.coeffs.c1;
    j["c2"] = f.coeffs.c2;
    j["c3"] = f.coeffs.c3;
    j["c4"] = f.coeffs.c4;
    j["kind"] = to_string(f.kind);
    j["undefined_region"] = to_string(f.undefined);
    j["sensitivity_value"] = sensitivity_value(f);
    if (f.kind == FunctionKind::hyperbolic) {
      HyperbolaForm h = to_hyperbola(f);
      j["hyperbola"] = {{"r", h.r}, {"s", h.s}, {"t", h.t}, {"quadrant", to_string(h.quadrant)}};
    }
    if (!curve.empty()) {
      ordered_json rows = ordered_json::array();
      for (const auto& [x, fx] : curve)
        rows.push_back({{"x", x}, {"f", fx ? ordered_json(*fx) : ordered_json(nullptr)}});
      j["curve"] = std::move(rows);
    }
    os << j.dump(2) << "\n";
    return 0;
  }

  if (fmt == OutputSpec::Format::csv && !curve.empty()) {
    os << "x,x_raw,f,f_raw\n";
    for (const auto& [x, fx] : curve) {
      csv_pair(os, x, prec);
      os << ',';
      if (fx)
        csv_pair(os, *fx, prec);
      else
        os << "undefined,undefined";
      os << '\n';
    }
    return 0;
  }

  if (fmt == OutputSpec::Format::csv) {
    os << "parameter,x0,x0_raw,p0,p0_raw,c1,c1_raw,c2,c2_raw,c3,c3_raw,c4,c4_raw,kind,"
          "sensitivity_value,sensitivity_value_raw\n"
       << parameter_to_string(net, pref) << ',';
    csv_pair(os, f.x0, prec);
    os << ',';
    csv_pair(os, f.p0, prec);
    os << ',';
    csv_pair(os, f.coeffs.c1, prec);
    os << ',';
    csv_pair(os, f.coeffs.c2, prec);
    os << ',';
    csv_pair(os, f.coeffs.c3, prec);
    os << ',';
    csv_pair(os, f.coeffs.c4, prec);
    os << ',' << to_string(f.kind) << ',';
    csv_pair(os, sensitivity_value(f), prec);
    os << '\n';
    return 0;
  }

  os << "parameter        " << parameter_to_string(net, pref) << "\n"
     << "target           " << args.target << "\n"
     << "evidence         " << profile_to_string(evidence, net) << "\n"
     << "x0               " << format_display(f.x0, prec) << "\n"
     << "p0               " << format_display(f.p0, prec) << "\n"
     << "f(x)             (" << format_display(f.coeffs.c1, prec) << "*x + "
     << format_display(f.coeffs.c2, prec) << ") / (" << format_display(f.coeffs.c3, prec)
     << "*x + " << format_display(f.coeffs.c4, prec) << ")\n"
     << "kind             " << to_string(f.kind) << "\n"
     << "sensitivity      " << format_display(sensitivity_value(f), prec) << "\n";
  if (f.undefined != UndefinedRegion::none)
    os << "undefined at     " << to_string(f.undefined) << "\n";
  if (f.kind == FunctionKind::hyperbolic) {
    HyperbolaForm h = to_hyperbola(f);
    os << "hyperbola        r=" << format_display(h.r, prec) << " s=" << format_display(h.s, prec)
       << " t=" << format_display(h.t, prec) << " quadrant " << to_string(h.quadrant) << "\n";
  }
  for (const auto& [x, fx] : curve)
    os << "  f(" << format_display(x, prec) << ") = "
       << (fx ? format_display(*fx, prec) : std::string("undefined")) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct BoundsArgs {
  double x0 = 0.5, p0 = 0.5;
  bool linear = false, surface = false;
  int samples = 0, surface_n = 99;
  std::string format = "table", output = "-";
  int precision = 6;
};

int run_bounds(const BoundsArgs& args) {
  Output out(args.output);
  std::ostream& os = out.stream();
  const auto fmt = parse_format(args.format);
  const int prec = args.precision;

  if (args.surface) {
    // grid for the bound surfaces over interior anchors
    const int n = args.surface_n;
    if (fmt == OutputSpec::Format::json) {
      ordered_json rows = ordered_json::array();
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
          const double x0 = static_cast<double>(i) / (n + 1);
          const double p0 = static_cast<double>(j) / (n + 1);
          const double b = args.linear ? linear_sensitivity_value_bound(x0, p0)
                                       : sensitivity_value_bound(x0, p0);
          rows.push_back({{"x0", x0}, {"p0", p0}, {"bound", b}});
        }
      os << rows.dump(2) << "\n";
      return 0;
    }
    os << "x0,x0_raw,p0,p0_raw,bound,bound_raw\n";
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const double x0 = static_cast<double>(i) / (n + 1);
        const double p0 = static_cast<double>(j) / (n + 1);
        const double b = args.linear ? linear_sensitivity_value_bound(x0, p0)
                                     : sensitivity_value_bound(x0, p0);
        csv_pair(os, x0, prec);
        os << ',';
        csv_pair(os, p0, prec);
        os << ',';
        csv_pair(os, b, prec);
        os << '\n';
      }
    return 0;
  }

  const double hyp_bound = sensitivity_value_bound(args.x0, args.p0);
  const double lin_bound = linear_sensitivity_value_bound(args.x0, args.p0);

  std::vector<std::array<double, 3>> curve;
  if (args.samples >= 2) {
    HyperbolicEnvelope henv = hyperbolic_envelope(args.x0, args.p0);
    LinearEnvelope lenv = linear_envelope(args.x0, args.p0);
    for (int i = 0; i < args.samples; ++i) {
      const double x = static_cast<double>(i) / (args.samples - 1);
      auto [lo, hi] = args.linear ? envelope_bounds_at(lenv, x) : envelope_bounds_at(henv, x);
      curve.push_back({x, lo, hi});
    }
  }

  if (fmt == OutputSpec::Format::json) {
    ordered_json j;
    j["x0"] = args.x0;
    j["p0"] = args.p0;
    j["kind"] = args.linear ? "linear" : "hyperbolic";
    if (args.linear) {
      LinearEnvelope env = linear_envelope(args.x0, args.p0);
      j["increasing"] = {{"gradient", env.increasing.gradient},
                         {"intercept", env.increasing.intercept}};
      j["decreasing"] = {{"gradient", env.decreasing.gradient},
                         {"intercept", env.decreasing.intercept}};
    } else {
      HyperbolicEnvelope env = hyperbolic_envelope(args.x0, args.p0);
      auto branch = [](const EnvelopeBranch& b) {
        if (b.is_line) return ordered_json{{"line", true}};
        return ordered_json{
            {"line", false}, {"r", b.r}, {"s", b.s}, {"t", b.t}, {"quadrant", to_string(b.quadrant)}};
      };
      j["increasing"] = branch(env.increasing);
      j["decreasing"] = branch(env.decreasing);
    }
    j["sensitivity_value_bound"] = hyp_bound;
    j["linear_sensitivity_value_bound"] = lin_bound;
    if (!curve.empty()) {
      ordered_json rows = ordered_json::array();
      for (const auto& [x, lo, hi] : curve)
        rows.push_back({{"x", x}, {"lower", lo}, {"upper", hi}});
      j["curve"] = std::move(rows);
    }
    os << j.dump(2) << "\n";
    return 0;
  }

  if (fmt == OutputSpec::Format::csv && !curve.empty()) {
    os << "x,x_raw,lower,lower_raw,upper,upper_raw\n";
    for (const auto& [x, lo, hi] : curve) {
      csv_pair(os, x, prec);
      os << ',';
      csv_pair(os, lo, prec);
      os << ',';
      csv_pair(os, hi, prec);
      os << '\n';
    }
    return 0;
  }

  os << "anchor           (x0, p0) = (" << format_display(args.x0, prec) << ", "
     << format_display(args.p0, prec) << ")\n"
     << "envelope         " << (args.linear ? "linear" : "hyperbolic") << "\n";
  if (args.linear) {
    LinearEnvelope env = linear_envelope(args.x0, args.p0);
    os << "increasing       " << format_display(env.increasing.gradient, prec) << "*x + "
       << format_display(env.increasing.intercept, prec) << "\n"
       << "decreasing       " << format_display(env.decreasing.gradient, prec) << "*x + "
       << format_display(env.decreasing.intercept, prec) << "\n";
  } else {
    HyperbolicEnvelope env = hyperbolic_envelope(args.x0, args.p0);
    auto describe = [&](const char* name, const EnvelopeBranch& b) {
      os << name;
      if (b.is_line)
        os << "degenerate line\n";
      else
        os << "r=" << format_display(b.r, prec) << " s=" << format_display(b.s, prec)
           << " t=" << format_display(b.t, prec) << " quadrant " << to_string(b.quadrant) << "\n";
    };
    describe("increasing       ", env.increasing);
    describe("decreasing       ", env.decreasing);
  }
  os << "value bound      " << format_display(hyp_bound, prec) << "\n"
     << "linear bound     " << format_display(lin_bound, prec) << "\n";
  for (const auto& [x, lo, hi] : curve)
    os << "  bounds(" << format_display(x, prec) << ") = [" << format_display(lo, prec) << ", "
       << format_display(hi, prec) << "]\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct DeviationArgs {
  double x0 = 0.5, p1 = -1.0, p2 = -1.0;
  bool linear = false, verify = false, curve = false;
  double invariant_from = -1.0;
  int curve_n = 99;
  std::string format = "table", output = "-";
  int precision = 6;
};

int run_deviation(const DeviationArgs& args) {
  Output out(args.output);
  std::ostream& os = out.stream();
  const auto fmt = parse_format(args.format);
  const int prec = args.precision;
  const FunctionKind kind = args.linear ? FunctionKind::linear : FunctionKind::hyperbolic;
  const auto pairwise =
      args.linear ? min_admissible_deviation_linear : min_admissible_deviation_hyperbolic;

  if (args.curve) {
    // binary section p2 = 1 - p1 over p1 in [0.5, 1)
    const int n = args.curve_n;
    if (fmt == OutputSpec::Format::json) {
      ordered_json rows = ordered_json::array();
      for (int k = 0; k < n; ++k) {
        const double p1 = 0.5 + 0.5 * k / n;
        DeviationBound d = pairwise(args.x0, p1, 1.0 - p1);
        rows.push_back({{"p1", p1}, {"alpha", d.alpha}, {"beta", d.beta}});
      }
      os << rows.dump(2) << "\n";
      return 0;
    }
    os << "p1,p1_raw,alpha,alpha_raw,beta,beta_raw,x_alpha,x_alpha_raw,x_beta,x_beta_raw\n";
    for (int k = 0; k < n; ++k) {
      const double p1 = 0.5 + 0.5 * k / n;
      DeviationBound d = pairwise(args.x0, p1, 1.0 - p1);
      csv_pair(os, p1, prec);
      os << ',';
      csv_pair(os, d.alpha, prec);
      os << ',';
      csv_pair(os, d.beta, prec);
      os << ',';
      csv_pair(os, d.x_alpha, prec);
      os << ',';
      csv_pair(os, d.x_beta, prec);
      os << '\n';
    }
    return 0;
  }

  if (args.invariant_from >= 0.0) {
    EvidenceInvariantDeviation inv =
        evidence_invariant_deviation(args.x0, args.invariant_from, kind);
    if (fmt == OutputSpec::Format::json) {
      ordered_json j;
      j["x0"] = args.x0;
      j["p1_lower"] = args.invariant_from;
      j["kind"] = to_string(kind);
      j["alpha"] = inv.bound.alpha;
      j["beta"] = inv.bound.beta;
      j["interval"] = {args.x0 - inv.bound.alpha, args.x0 + inv.bound.beta};
      j["p1_at_min_alpha"] = inv.p1_at_min_alpha;
      j["p1_at_min_beta"] = inv.p1_at_min_beta;
      os << j.dump(2) << "\n";
      return 0;
    }
    os << "evidence-invariant deviation for p1 >= " << format_display(args.invariant_from, prec)
       << " (" << to_string(kind) << ")\n"
       << "(alpha, beta)    (" << format_display(inv.bound.alpha, prec) << ", "
       << format_display(inv.bound.beta, prec) << ")\n"
       << "interval         [" << format_display(args.x0 - inv.bound.alpha, prec) << ", "
       << format_display(args.x0 + inv.bound.beta, prec) << "]\n"
       << "minimizing p1    alpha at " << format_display(inv.p1_at_min_alpha, prec) << ", beta at "
       << format_display(inv.p1_at_min_beta, prec) << "\n";
    return 0;
  }

  if (args.p1 < 0.0 || args.p2 < 0.0)
    throw std::invalid_argument("point mode needs --p1 and --p2 (or use --curve / --invariant-from)");

  DeviationBound d = pairwise(args.x0, args.p1, args.p2);
  DeviationBound oracle;
  double gap = 0.0;
  if (args.verify) {
    oracle = deviation_by_intersection(args.x0, args.p1, args.p2, kind);
    gap = std::max(std::abs(d.alpha - oracle.alpha), std::abs(d.beta - oracle.beta));
  }

  if (fmt == OutputSpec::Format::json) {
    ordered_json j;
    j["x0"] = args.x0;
    j["p1"] = args.p1;
    j["p2"] = args.p2;
    j["kind"] = to_string(kind);
    j["alpha"] = d.alpha;
    j["beta"] = d.beta;
    j["interval"] = {args.x0 - d.alpha, args.x0 + d.beta};
    j["x_alpha"] = d.x_alpha;
    j["x_beta"] = d.x_beta;
    j["clamped_low"] = d.clamped_low;
    j["clamped_high"] = d.clamped_high;
    if (args.verify) {
      j["oracle"] = {{"alpha", oracle.alpha}, {"beta", oracle.beta}, {"gap", gap}};
      j["verified"] = gap <= 1e-9;
    }
    os << j.dump(2) << "\n";
  } else {
    os << "minimum admissible deviation (" << to_string(kind) << ")\n"
       << "(alpha, beta)    (" << format_display(d.alpha, prec) << ", "
       << format_display(d.beta, prec) << ")\n"
       << "interval         [" << format_display(args.x0 - d.alpha, prec) << ", "
       << format_display(args.x0 + d.beta, prec) << "]\n"
       << "bounding values  x_alpha=" << format_display(d.x_alpha, prec)
       << (d.clamped_low ? " (clamped)" : "") << " x_beta=" << format_display(d.x_beta, prec)
       << (d.clamped_high ? " (clamped)" : "") << "\n";
    if (args.verify)
      os << "oracle           (" << format_display(oracle.alpha, prec) << ", "
         << format_display(oracle.beta, prec) << ") gap " << format_display(gap, 3)
         << (gap <= 1e-9 ? " agreed" : " DISAGREED") << "\n";
  }
  if (args.verify && gap > 1e-9) return 3;
  return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string network, target, observables, param;
  bool all_params = false;
  double grid = 1e-3;
  std::uint64_t cap = kDefaultProfileCap;
  std::string engine = "enumeration";
  std::string format = "table", output = "-";
  int precision = 6;
};

int run_sweep(const SweepArgs& args) {
  DiscreteNetwork net = load_network_file(args.network);
  const auto target = parse_target(net, args.target);
  const std::vector<std::string> observables = split_list(args.observables);

  SweepOptions options;
  options.grid_step = args.grid;
  options.profile_cap = args.cap;
  options.engine = parse_engine(args.engine);

  std::vector<LabeledSweep> sweeps;
  if (args.all_params) {
    for (int node = 0; node < net.node_count(); ++node)
      for (int row = 0; row < net.row_count(node); ++row)
        for (int state = 0; state < net.variable(node).arity(); ++state) {
          const double x0 = net.cpt(node)[row][state];
          ParameterRef pref{net.variable(node).name, state, net.row_config(node, row)};
          if (x0 < 0.01 || x0 > 0.99) {
            std::cerr << "skip: " << parameter_to_string(net, pref) << " (x0="
                      << format_display(x0, args.precision)
                      << ((x0 == 0.0 || x0 == 1.0) ? ", deterministic entry"
                                                   : ", within 0.01 of the boundary")
                      << ")\n";
            continue;
          }
          LabeledSweep entry{parameter_to_string(net, pref),
                             sweep(net, target, observables, pref, options)};
          if (entry.result.refused) {
            std::cerr << "profile cap exceeded: " << entry.result.profile_count
                      << " profiles (cap " << args.cap << ")\n";
            return 2;
          }
          sweeps.push_back(std::move(entry));
        }
  } else {
    if (args.param.empty())
      throw std::invalid_argument("pass --param NODE:STATE|P=s,... or --all-params");
    ParameterRef pref = parse_parameter(net, args.param);
    LabeledSweep entry{parameter_to_string(net, pref),
                       sweep(net, target, observables, pref, options)};
    if (entry.result.refused) {
      std::cerr << "profile cap exceeded: " << entry.result.profile_count << " profiles (cap "
                << args.cap << ")\n";
      return 2;
    }
    sweeps.push_back(std::move(entry));
  }

  Output out(args.output);
  std::ostream& os = out.stream();
  switch (parse_format(args.format)) {
    case OutputSpec::Format::csv:
      write_sweeps_csv(os, sweeps, net, args.precision);
      break;
    case OutputSpec::Format::json:
      os << sweeps_to_json(sweeps, net).dump(2) << "\n";
      break;
    case OutputSpec::Format::table:
      write_sweeps_table(os, sweeps, net, args.precision);
      break;
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string network;
  int random_count = 0;
  std::uint64_t seed = 7;
  double grid = 1e-3;
  std::string target, observables;
  double inject_fault = 0.0;
  std::string engine = "enumeration";
  std::string format = "table", output = "-";
  int precision = 6;
};

int run_verify(const VerifyArgs& args) {
  SweepOptions options;
  options.grid_step = args.grid;
  options.engine = parse_engine(args.engine);
  options.fault_t_shift = args.inject_fault;

  const auto start = std::chrono::steady_clock::now();
  ordered_json j;
  bool pass = true;

  if (args.random_count > 0) {
    Rng rng(args.seed);
    j["mode"] = "random";
    j["seed"] = args.seed;
    j["network_count"] = args.random_count;
    j["grid_step"] = args.grid;
    ordered_json networks = ordered_json::array();
    std::uint64_t parameters = 0, profiles = 0, findings = 0;
    for (int k = 0; k < args.random_count; ++k) {
      DiscreteNetwork net = random_network(rng);
      VerifyPlan plan = default_verify_plan(net);
      VerifyReport report = verify_network(net, plan.target, plan.observables, options);
      pass = pass && report.pass;
      parameters += report.parameters_checked;
      profiles += report.profiles_total;
      findings += report.findings.size();
      ordered_json entry;
      entry["index"] = k;
      entry["nodes"] = net.node_count();
      entry["target"] = plan.target.first + "=" + net.variable(0).states[plan.target.second];
      ordered_json obs = ordered_json::array();
      for (const auto& o : plan.observables) obs.push_back(o);
      entry["observables"] = std::move(obs);
      ordered_json body = verify_to_json(report);
      for (auto& [key, value] : body.items()) entry[key] = std::move(value);
      networks.push_back(std::move(entry));
    }
    j["verdict"] = pass ? "PASS" : "FAIL";
    j["parameters_checked"] = parameters;
    j["profiles_total"] = profiles;
    j["findings_total"] = findings;
    j["networks"] = std::move(networks);
  } else {
    if (args.network.empty())
      throw std::invalid_argument("pass a network file or --random N");
    DiscreteNetwork net = load_network_file(args.network);
    VerifyPlan plan = default_verify_plan(net);
    if (!args.target.empty()) plan.target = parse_target(net, args.target);
    if (!args.observables.empty()) plan.observables = split_list(args.observables);
    VerifyReport report = verify_network(net, plan.target, plan.observables, options);
    pass = report.pass;
    j["mode"] = "file";
    j["network"] = args.network;
    j["target"] = plan.target.first;
    j["target_state"] = plan.target.second;
    ordered_json obs = ordered_json::array();
    for (const auto& o : plan.observables) obs.push_back(o);
    j["observables"] = std::move(obs);
    j["grid_step"] = args.grid;
    ordered_json body = verify_to_json(report);
    for (auto& [key, value] : body.items()) j[key] = std::move(value);
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Output out(args.output);
  std::ostream& os = out.stream();
  if (parse_format(args.format) == OutputSpec::Format::json) {
    os << j.dump(2) << "\n";
  } else {
    os << (pass ? "PASS" : "FAIL") << "\n";
    os << "parameters checked: " << j["parameters_checked"] << ", profiles: "
       << j["profiles_total"] << "\n";
    if (j.contains("findings") && !j["findings"].empty())
      for (const auto& f : j["findings"])
        os << "  [" << f["kind"].get<std::string>() << "] " << f["parameter"].get<std::string>()
           << " @ " << f["profile"].get<std::string>() << "\n";
    if (j.contains("networks"))
      for (const auto& n : j["networks"])
        for (const auto& f : n["findings"])
          os << "  [" << f["kind"].get<std::string>() << "] net " << n["index"] << " "
             << f["parameter"].get<std::string>() << " @ " << f["profile"].get<std::string>()
             << "\n";
  }
  std::cerr << "verify runtime: " << format_display(seconds, 3) << " s\n";
  return pass ? 0 : 3;
}

int run_validate(const std::string& path) {
  DiscreteNetwork net = load_network_file(path);
  std::uint64_t parameters = 0;
  for (int i = 0; i < net.node_count(); ++i)
    parameters += static_cast<std::uint64_t>(net.row_count(i)) * net.variable(i).arity();
  std::cout << "OK: " << net.node_count() << " variables, " << parameters << " parameters\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "one-way sensitivity analysis of discrete probabilistic networks with "
      "evidence-invariant bounds"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "load and validate a network document");
  validate->add_option("network", validate_path, "network document")->required();

  SensfunArgs sf;
  auto* sensfun = app.add_subcommand("sensfun", "derive one sensitivity function");
  sensfun->add_option("network", sf.network)->required();
  sensfun->add_option("--target", sf.target, "VAR=STATE probability of interest")->required();
  sensfun->add_option("--param", sf.param, "NODE:STATE|P1=s1,P2=s2")->required();
  sensfun->add_option("--evidence", sf.evidence, "VAR=STATE observations (repeat or join with ,)");
  sensfun->add_option("--samples", sf.samples, "emit the curve at N points");
  sensfun->add_option("--engine", sf.engine, "enumeration|elimination");
  sensfun->add_option("--format", sf.format, "table|csv|json");
  sensfun->add_option("--output", sf.output, "destination path, - for stdout");
  sensfun->add_option("--precision", sf.precision, "display digits");

  BoundsArgs bd;
  auto* bounds = app.add_subcommand("bounds", "evidence-invariant envelopes and value bounds");
  bounds->add_option("--x0", bd.x0, "original parameter value");
  bounds->add_option("--p0", bd.p0, "original probability of interest");
  bounds->add_flag("--linear", bd.linear, "use the linear envelope");
  bounds->add_option("--samples", bd.samples, "emit the envelope curve at N points");
  bounds->add_flag("--surface", bd.surface, "emit the value-bound surface over (x0, p0)");
  bounds->add_option("--surface-n", bd.surface_n, "interior grid points per axis");
  bounds->add_option("--format", bd.format, "table|csv|json");
  bounds->add_option("--output", bd.output);
  bounds->add_option("--precision", bd.precision);

  DeviationArgs dv;
  auto* deviation = app.add_subcommand("deviation", "minimum admissible deviations");
  deviation->add_option("--x0", dv.x0, "original parameter value")->required();
  deviation->add_option("--p1", dv.p1, "probability of the most likely value");
  deviation->add_option("--p2", dv.p2, "probability of the runner-up value");
  deviation->add_flag("--linear", dv.linear, "linear-envelope deviation");
  deviation->add_flag("--verify", dv.verify, "check the closed form against the intersection oracle");
  deviation->add_flag("--curve", dv.curve, "binary section: sweep p1 with p2 = 1 - p1");
  deviation->add_option("--curve-n", dv.curve_n, "points of the binary section");
  deviation->add_option("--invariant-from", dv.invariant_from,
                        "minimum over all binary anchors with p1 >= this value");
  deviation->add_option("--format", dv.format, "table|csv|json");
  deviation->add_option("--output", dv.output);
  deviation->add_option("--precision", dv.precision);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "per-profile analysis over evidence profiles");
  sweep_cmd->add_option("network", sw.network)->required();
  sweep_cmd->add_option("--target", sw.target, "VAR=STATE probability of interest")->required();
  sweep_cmd->add_option("--observables", sw.observables, "comma-separated observable variables");
  sweep_cmd->add_option("--param", sw.param, "NODE:STATE|P1=s1,...");
  sweep_cmd->add_flag("--all-params", sw.all_params, "sweep every interior parameter");
  sweep_cmd->add_option("--grid", sw.grid, "containment grid step");
  sweep_cmd->add_option("--cap", sw.cap, "profile cap");
  sweep_cmd->add_option("--engine", sw.engine, "enumeration|elimination");
  sweep_cmd->add_option("--format", sw.format, "table|csv|json");
  sweep_cmd->add_option("--output", sw.output);
  sweep_cmd->add_option("--precision", sw.precision);

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "bound verification over a whole network");
  verify->add_option("network", vf.network, "network document");
  verify->add_option("--random", vf.random_count, "verify N seeded random networks instead");
  verify->add_option("--seed", vf.seed, "generator seed")->envname("SENSBOUND_SEED");
  verify->add_option("--grid", vf.grid, "containment grid step");
  verify->add_option("--target", vf.target, "VAR=STATE (file mode)");
  verify->add_option("--observables", vf.observables, "comma-separated list (file mode)");
  verify->add_option("--inject-fault", vf.inject_fault,
                     "offset the envelope by this much (harness self-test)");
  verify->add_option("--engine", vf.engine, "enumeration|elimination");
  verify->add_option("--format", vf.format, "table|json");
  verify->add_option("--output", vf.output);
  verify->add_option("--precision", vf.precision);

  int rc = 0;
  validate->callback([&] { rc = run_validate(validate_path); });
  sensfun->callback([&] { rc = run_sensfun(sf); });
  bounds->callback([&] { rc = run_bounds(bd); });
  deviation->callback([&] { rc = run_deviation(dv); });
  sweep_cmd->callback([&] { rc = run_sweep(sw); });
  verify->callback([&] { rc = run_verify(vf); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
