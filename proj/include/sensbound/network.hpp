#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sensbound {

/// Absolute tolerance on CPT row sums accepted by the loader. Rows inside
/// the tolerance are renormalized exactly, so internal arithmetic can hold
/// rows to ~1e-15.
inline constexpr double kRowSumLoadTolerance = 1e-9;

struct Variable {
  std::string name;
  std::vector<std::string> states;

  int arity() const { return static_cast<int>(states.size()); }
  /// Index of a state name, -1 if unknown.
  int state_index(std::string_view state) const;
};

/// Identifies one parameter p(state | parent configuration) of one node.
/// parent_states holds one state index per parent, in parent-list order; it
/// is empty for root nodes.
struct ParameterRef {
  std::string node;
  int state_index = 0;
  std::vector<int> parent_states;
};

/// A joint observation of some variables. Each variable appears at most
/// once; insertion order is preserved and used for reporting.
class EvidenceProfile {
 public:
  EvidenceProfile() = default;

  /// Adds an observation. Throws std::invalid_argument on a duplicate
  /// variable.
  void observe(std::string variable, int state);

  std::optional<int> state_of(std::string_view variable) const;
  bool observes(std::string_view variable) const { return state_of(variable).has_value(); }
  const std::vector<std::pair<std::string, int>>& observations() const { return obs_; }
  bool empty() const { return obs_.empty(); }
  std::size_t size() const { return obs_.size(); }

 private:
  std::vector<std::pair<std::string, int>> obs_;
};

/// An immutable directed acyclic network of discrete variables with one
/// conditional probability table per node.
///
/// CPT rows are indexed by parent configuration in row-major order with the
/// FIRST listed parent varying slowest; entries within a row follow the
/// node's state order. The constructor validates names, shapes, acyclicity
/// and row sums (within kRowSumLoadTolerance), then renormalizes each row.
class DiscreteNetwork {
 public:
  DiscreteNetwork(std::vector<Variable> variables,
                  std::vector<std::vector<int>> parents,
                  std::vector<std::vector<std::vector<double>>> cpts);

  int node_count() const { return static_cast<int>(vars_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const Variable& variable(int node) const { return vars_[node]; }

  /// Index of a variable name, -1 if unknown.
  int index_of(std::string_view name) const;
  /// As index_of but throws std::out_of_range for unknown names.
  int require_index(std::string_view name) const;

  const std::vector<int>& parents(int node) const { return parents_[node]; }
  const std::vector<std::vector<double>>& cpt(int node) const { return cpt_[node]; }
  int row_count(int node) const { return static_cast<int>(cpt_[node].size()); }

  /// Row index for a full parent-state configuration of `node`.
  int row_index(int node, std::span<const int> parent_states) const;
  /// Inverse of row_index.
  std::vector<int> row_config(int node, int row) const;

  /// True when `other` is a descendant of `node`, counting a node as a
  /// descendant of itself.
  bool is_descendant(int node, int other) const;

  std::uint64_t joint_assignment_count() const;

  struct ResolvedParameter {
    int node;
    int row;
    int state;
  };
  /// Range-checks a ParameterRef against this network.
  ResolvedParameter resolve(const ParameterRef& pref) const;

  friend DiscreteNetwork apply_parameter(const DiscreteNetwork& net,
                                         const ParameterRef& pref, double x);

 private:
  std::vector<Variable> vars_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<std::vector<double>>> cpt_;
  std::vector<std::vector<bool>> descendants_;  // [node][other], improper
};

/// Parses and validates a network document (see README for the format).
DiscreteNetwork load_network(const std::string& text);
DiscreteNetwork load_network_file(const std::string& path);
/// Serializes a network back to the document format.
std::string save_network(const DiscreteNetwork& net, int indent = 2);

/// The CPT entry p(state | parent configuration).
double parameter_value(const DiscreteNetwork& net, const ParameterRef& pref);

/// Returns a copy of `net` whose row at `pref` has the referenced entry set
/// to x and every sibling entry rescaled proportionally so the row stays
/// normalized. All other rows are bit-identical to the input. Requires
/// 0 <= x <= 1 and an original entry < 1 (otherwise there is no sibling
/// mass to rescale; reported as std::domain_error).
DiscreteNetwork apply_parameter(const DiscreteNetwork& net, const ParameterRef& pref, double x);

void validate_evidence(const DiscreteNetwork& net, const EvidenceProfile& evidence);

inline constexpr std::uint64_t kDefaultProfileCap = 1'000'000;

struct ProfileEnumeration {
  std::uint64_t count = 0;
  bool materialized = false;
  std::vector<EvidenceProfile> profiles;
};

/// Cartesian product of the observables' state sets, in row-major order with
/// the first listed variable varying slowest. Refuses to materialize beyond
/// `cap` profiles and returns a count-only result instead.
ProfileEnumeration enumerate_profiles(const DiscreteNetwork& net,
                                      std::span<const std::string> observables,
                                      std::uint64_t cap = kDefaultProfileCap);

}  // namespace sensbound
