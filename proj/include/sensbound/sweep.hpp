#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sensbound/envelope.hpp"
#include "sensbound/inference.hpp"
#include "sensbound/network.hpp"
#include "sensbound/sensfun.hpp"

namespace sensbound {

/// Deterministic uniform draws on top of the fixed mt19937_64 stream; avoids
/// the implementation-defined standard distributions so reports are
/// bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

struct NetworkGenOptions {
  int min_nodes = 4, max_nodes = 6;
  int min_arity = 2, max_arity = 3;
  double edge_probability = 0.4;
  /// CPT rows are drawn uniformly from the simplex, then shrunk toward the
  /// uniform row so every entry lands in [margin, 1 - margin] with the row
  /// still summing to one.
  double boundary_margin = 0.01;
};

DiscreteNetwork random_network(Rng& rng, const NetworkGenOptions& options = {});

/// True when no evidence variable is a descendant of the parameter's node
/// (counting the node itself); a sufficient condition for the derived
/// function to be linear.
bool structural_linear(const DiscreteNetwork& net, const ParameterRef& pref,
                       std::span<const std::string> evidence_vars);

struct SweepOptions {
  double grid_step = 1e-3;
  std::uint64_t profile_cap = kDefaultProfileCap;
  Engine engine = Engine::enumeration;
  /// Fault-injection hook: offsets both envelope branches (the constant t)
  /// before the containment check, proving the harness catches a corrupted
  /// bound.
  double fault_t_shift = 0.0;
};

inline constexpr double kContainmentTolerance = 1e-9;

enum class RecordStatus { ok, undefined_evidence, boundary_posterior };

struct ProfileRecord {
  EvidenceProfile profile;
  RecordStatus status = RecordStatus::ok;
  double evidence_probability = 0.0;
  double x0 = 0.0;
  double p0 = 0.0;                             // target state's probability of interest
  SensCoefficients coeffs;                     // target state function
  std::vector<SensCoefficients> state_coeffs;  // every state, shared denominator
  std::vector<double> state_p0;
  UndefinedRegion undefined = UndefinedRegion::none;
  FunctionKind kind = FunctionKind::linear;
  bool structurally_linear = false;
  double sensitivity_value = 0.0;
  int most_likely_state = -1;
  AdmissibleDeviation exact_deviation;
  bool exact_defined = false;
  DeviationBound bound_deviation;
  bool bound_defined = false;
  bool containment_ok = true;
  double max_envelope_violation = 0.0;
};

struct AggregateReport {
  std::uint64_t profile_count = 0;
  std::uint64_t undefined_count = 0;
  std::uint64_t boundary_count = 0;
  double worst_sensitivity_value = 0.0;
  long worst_profile = -1;
  double min_alpha = std::numeric_limits<double>::infinity();
  long min_alpha_profile = -1;
  double min_beta = std::numeric_limits<double>::infinity();
  long min_beta_profile = -1;
  std::vector<long> containment_violations;  // profile indices; must stay empty
  long structural_linear_count = 0;
  long numeric_linear_count = 0;
};

struct SweepResult {
  bool refused = false;  // profile cap exceeded; only profile_count is valid
  std::uint64_t profile_count = 0;
  std::vector<ProfileRecord> records;
  AggregateReport aggregate;
};

/// One record per evidence profile of the observables: the derived function,
/// its envelope containment on the x-grid, and both the exact and the
/// bound-derived admissible deviations for the target variable.
SweepResult sweep(const DiscreteNetwork& net, const std::pair<std::string, int>& target,
                  std::span<const std::string> observables, const ParameterRef& pref,
                  const SweepOptions& options = {});

struct SkipRecord {
  std::string parameter;
  double x0 = 0.0;
  std::string reason;
};

struct VerifyFinding {
  std::string kind;
  std::string parameter;
  std::string profile;
  std::string detail;
  double magnitude = 0.0;
};

struct ParameterSummary {
  std::string parameter;
  double x0 = 0.0;
  bool structurally_linear = false;
  std::uint64_t profiles = 0;
  std::uint64_t undefined = 0;
  long linear_records = 0;
  double worst_sensitivity_value = 0.0;
  double min_bound_alpha = 0.0;
  double min_bound_beta = 0.0;
  double max_envelope_violation = 0.0;
};

struct VerifyReport {
  bool pass = true;
  std::uint64_t parameters_checked = 0;
  std::uint64_t profiles_total = 0;
  std::uint64_t undefined_profiles = 0;
  std::vector<SkipRecord> skips;
  std::vector<VerifyFinding> findings;
  double max_envelope_violation = 0.0;
  double max_delta_equivalence_gap = 0.0;
  double max_numerator_identity_gap = 0.0;
  double max_closed_vs_intersection_gap = 0.0;
  std::vector<ParameterSummary> parameters;
};

/// Sweeps every eligible parameter of the network (entries within
/// [0.01, 0.99]; the rest get skip records) and checks, per profile:
/// envelope containment, linear containment under structural linearity,
/// bound-deviation soundness against the exact deviation (n-ary and per
/// competitor), numerator completeness, envelope/log-odds-bound equivalence
/// on the grid, and closed-form deviations against the intersection oracle.
/// Violations become findings, never exceptions.
VerifyReport verify_network(const DiscreteNetwork& net, const std::pair<std::string, int>& target,
                            std::span<const std::string> observables,
                            const SweepOptions& options = {});

/// Canonical choice when none is given: the first variable (state 0) as
/// target, the last up-to-three other variables as observables.
struct VerifyPlan {
  std::pair<std::string, int> target;
  std::vector<std::string> observables;
};
VerifyPlan default_verify_plan(const DiscreteNetwork& net);

/// CLI parameter syntax NODE:STATE|P1=s1,P2=s2 (no pipe for root nodes).
std::string parameter_to_string(const DiscreteNetwork& net, const ParameterRef& pref);
ParameterRef parse_parameter(const DiscreteNetwork& net, const std::string& text);

std::string profile_to_string(const EvidenceProfile& profile, const DiscreteNetwork& net);

}  // namespace sensbound
