#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sensbound/network.hpp"

namespace sensbound {

/// Exact enumeration refuses joints beyond this many assignments.
inline constexpr std::uint64_t kJointEnumerationCap = std::uint64_t{1} << 24;

struct Query {
  std::optional<std::pair<std::string, int>> target;  // (variable, state index)
  EvidenceProfile evidence;
};

struct MarginalResult {
  double joint = 0.0;     // Pr(target, evidence)
  double evidence = 0.0;  // Pr(evidence)
  std::optional<double> conditional;  // Pr(target | evidence); empty when Pr(evidence) = 0
};

/// Full-joint enumeration is the reference engine; variable elimination is an
/// accelerator that must match it to 1e-12.
enum class Engine { enumeration, variable_elimination };

/// Chain-rule product over all nodes for one full assignment (one state index
/// per variable, in network order).
double joint_probability(const DiscreteNetwork& net, std::span<const int> assignment);

MarginalResult marginal(const DiscreteNetwork& net, const Query& query,
                        Engine engine = Engine::enumeration);

/// Pr(state, evidence) for every state of `variable`, plus Pr(evidence).
/// The building block shared by posterior() and sensitivity derivation.
std::pair<std::vector<double>, double> state_joints(const DiscreteNetwork& net,
                                                    const std::string& variable,
                                                    const EvidenceProfile& evidence,
                                                    Engine engine = Engine::enumeration);

struct Posterior {
  std::string variable;
  std::vector<double> probabilities;  // meaningful only when defined
  double evidence_probability = 0.0;
  bool defined = false;  // false when Pr(evidence) = 0
};

Posterior posterior(const DiscreteNetwork& net, const std::string& variable,
                    const EvidenceProfile& evidence, Engine engine = Engine::enumeration);

}  // namespace sensbound
