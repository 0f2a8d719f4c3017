#include "sensbound/inference.hpp"

#include <algorithm>
#include <stdexcept>

namespace sensbound {

namespace {

// Evidence as one slot per variable, -1 when unobserved.
std::vector<int> restriction_vector(const DiscreteNetwork& net, const EvidenceProfile& evidence) {
  std::vector<int> fixed(net.node_count(), -1);
  for (const auto& [name, state] : evidence.observations()) fixed[net.require_index(name)] = state;
  return fixed;
}

void check_enumeration_size(const DiscreteNetwork& net) {
  if (net.joint_assignment_count() > kJointEnumerationCap)
    throw std::domain_error("network joint exceeds the exact-enumeration cap of 2^24 assignments");
}

// Sums the chain-rule product over every assignment consistent with `fixed`,
// accumulating one total per state of `accumulate_var` (or a single total when
// accumulate_var < 0). Returns (per-state sums, overall sum).
std::pair<std::vector<double>, double> enumerate_sums(const DiscreteNetwork& net,
                                                      const std::vector<int>& fixed,
                                                      int accumulate_var) {
  const int n = net.node_count();
  std::vector<int> free_vars;
  for (int i = 0; i < n; ++i)
    if (fixed[i] < 0) free_vars.push_back(i);

  std::vector<int> assignment(fixed);
  for (int v : free_vars) assignment[v] = 0;

  std::vector<double> per_state;
  if (accumulate_var >= 0) per_state.assign(net.variable(accumulate_var).arity(), 0.0);
  double total = 0.0;

  while (true) {
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      int row = 0;
      for (int parent : net.parents(i)) row = row * net.variable(parent).arity() + assignment[parent];
      p *= net.cpt(i)[row][assignment[i]];
    }
    total += p;
    if (accumulate_var >= 0) per_state[assignment[accumulate_var]] += p;

    int k = static_cast<int>(free_vars.size()) - 1;
    while (k >= 0) {
      int v = free_vars[k];
      if (++assignment[v] < net.variable(v).arity()) break;
      assignment[v] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return {std::move(per_state), total};
}

// ---------------------------------------------------------------------------
// Variable elimination. Factor variables are kept in ascending network index
// with the first variable varying slowest; restricted variables are sliced
// out up front and all remaining ones are eliminated in ascending order.

struct Factor {
  std::vector<int> vars;
  std::vector<double> values;
};

std::vector<int> factor_arities(const DiscreteNetwork& net, const std::vector<int>& vars) {
  std::vector<int> a;
  a.reserve(vars.size());
  for (int v : vars) a.push_back(net.variable(v).arity());
  return a;
}

Factor restricted_cpt_factor(const DiscreteNetwork& net, int node, const std::vector<int>& fixed) {
  std::vector<int> scope = net.parents(node);
  scope.push_back(node);
  std::sort(scope.begin(), scope.end());

  Factor out;
  for (int v : scope)
    if (fixed[v] < 0) out.vars.push_back(v);
  auto out_arities = factor_arities(net, out.vars);
  std::size_t size = 1;
  for (int a : out_arities) size *= a;
  out.values.assign(size, 0.0);

  std::vector<int> state(scope.size(), 0);
  while (true) {
    bool consistent = true;
    std::size_t out_index = 0;
    for (std::size_t i = 0, o = 0; i < scope.size(); ++i) {
      int v = scope[i];
      if (fixed[v] >= 0) {
        if (state[i] != fixed[v]) {
          consistent = false;
          break;
        }
      } else {
        out_index = out_index * out_arities[o] + state[i];
        ++o;
      }
    }
    if (consistent) {
      int row = 0;
      auto lookup = [&](int v) {
        for (std::size_t i = 0; i < scope.size(); ++i)
          if (scope[i] == v) return state[i];
        return -1;
      };
      for (int parent : net.parents(node))
        row = row * net.variable(parent).arity() + lookup(parent);
      out.values[out_index] += net.cpt(node)[row][lookup(node)];
    }
    int k = static_cast<int>(scope.size()) - 1;
    while (k >= 0) {
      if (++state[k] < net.variable(scope[k]).arity()) break;
      state[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return out;
}

Factor multiply(const DiscreteNetwork& net, const Factor& a, const Factor& b) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(),
                 std::back_inserter(out.vars));
  auto arities = factor_arities(net, out.vars);
  std::size_t size = 1;
  for (int x : arities) size *= x;
  out.values.assign(size, 0.0);

  std::vector<int> state(out.vars.size(), 0);
  auto index_into = [&](const Factor& f) {
    std::size_t idx = 0;
    for (std::size_t i = 0, j = 0; i < out.vars.size() && j < f.vars.size(); ++i) {
      if (out.vars[i] == f.vars[j]) {
        idx = idx * net.variable(f.vars[j]).arity() + state[i];
        ++j;
      }
    }
    return idx;
  };
  for (std::size_t flat = 0; flat < size; ++flat) {
    out.values[flat] = a.values[index_into(a)] * b.values[index_into(b)];
    for (int k = static_cast<int>(out.vars.size()) - 1; k >= 0; --k) {
      if (++state[k] < arities[k]) break;
      state[k] = 0;
    }
  }
  return out;
}

Factor sum_out(const DiscreteNetwork& net, const Factor& f, int var) {
  Factor out;
  int pos = -1;
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    if (f.vars[i] == var)
      pos = static_cast<int>(i);
    else
      out.vars.push_back(f.vars[i]);
  }
  auto in_arities = factor_arities(net, f.vars);
  std::size_t out_size = f.vars.empty() ? 1 : f.values.size() / in_arities[pos];
  out.values.assign(out_size, 0.0);

  std::vector<int> state(f.vars.size(), 0);
  for (std::size_t flat = 0; flat < f.values.size(); ++flat) {
    std::size_t out_index = 0;
    for (std::size_t i = 0; i < f.vars.size(); ++i)
      if (static_cast<int>(i) != pos) out_index = out_index * in_arities[i] + state[i];
    out.values[out_index] += f.values[flat];
    for (int k = static_cast<int>(f.vars.size()) - 1; k >= 0; --k) {
      if (++state[k] < in_arities[k]) break;
      state[k] = 0;
    }
  }
  return out;
}

// Pr of the restriction: multiplies every (restricted) CPT factor and sums
// out all remaining variables in ascending index order.
double eliminate_all(const DiscreteNetwork& net, const std::vector<int>& fixed) {
  std::vector<Factor> factors;
  factors.reserve(net.node_count());
  for (int i = 0; i < net.node_count(); ++i) factors.push_back(restricted_cpt_factor(net, i, fixed));

  for (int v = 0; v < net.node_count(); ++v) {
    if (fixed[v] >= 0) continue;
    Factor combined;
    combined.values = {1.0};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end())
        combined = multiply(net, combined, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(sum_out(net, combined, v));
    factors = std::move(rest);
  }

  double result = 1.0;
  for (const auto& f : factors)
    for (double v : f.values) result *= v;
  return result;
}

void validate_query(const DiscreteNetwork& net, const Query& query) {
  validate_evidence(net, query.evidence);
  if (query.target) {
    const auto& [name, state] = *query.target;
    int idx = net.require_index(name);
    if (state < 0 || state >= net.variable(idx).arity())
      throw std::out_of_range("target state index " + std::to_string(state) +
                              " out of range for '" + name + "'");
    if (query.evidence.observes(name))
      throw std::invalid_argument("target variable '" + name + "' is observed");
  }
}

}  // namespace

double joint_probability(const DiscreteNetwork& net, std::span<const int> assignment) {
  if (static_cast<int>(assignment.size()) != net.node_count())
    throw std::invalid_argument("assignment covers " + std::to_string(assignment.size()) +
                                " variables, expected " + std::to_string(net.node_count()));
  double p = 1.0;
  for (int i = 0; i < net.node_count(); ++i) {
    if (assignment[i] < 0 || assignment[i] >= net.variable(i).arity())
      throw std::out_of_range("assignment state out of range for '" + net.variable(i).name + "'");
    int row = 0;
    for (int parent : net.parents(i))
      row = row * net.variable(parent).arity() + assignment[parent];
    p *= net.cpt(i)[row][assignment[i]];
  }
  return p;
}

MarginalResult marginal(const DiscreteNetwork& net, const Query& query, Engine engine) {
  validate_query(net, query);
  check_enumeration_size(net);
  auto fixed = restriction_vector(net, query.evidence);

  MarginalResult result;
  if (engine == Engine::enumeration) {
    if (query.target) {
      int tvar = net.require_index(query.target->first);
      auto [per_state, total] = enumerate_sums(net, fixed, tvar);
      result.evidence = total;
      result.joint = per_state[query.target->second];
    } else {
      auto [per_state, total] = enumerate_sums(net, fixed, -1);
      result.evidence = total;
      result.joint = total;
    }
  } else {
    result.evidence = eliminate_all(net, fixed);
    if (query.target) {
      auto with_target = fixed;
      with_target[net.require_index(query.target->first)] = query.target->second;
      result.joint = eliminate_all(net, with_target);
    } else {
      result.joint = result.evidence;
    }
  }
  if (result.evidence > 0.0) result.conditional = result.joint / result.evidence;
  return result;
}

std::pair<std::vector<double>, double> state_joints(const DiscreteNetwork& net,
                                                    const std::string& variable,
                                                    const EvidenceProfile& evidence,
                                                    Engine engine) {
  int var = net.require_index(variable);
  if (evidence.observes(variable))
    throw std::invalid_argument("variable '" + variable + "' is observed");
  validate_evidence(net, evidence);
  check_enumeration_size(net);
  auto fixed = restriction_vector(net, evidence);

  if (engine == Engine::enumeration) return enumerate_sums(net, fixed, var);

  double total = eliminate_all(net, fixed);
  std::vector<double> per_state(net.variable(var).arity(), 0.0);
  for (int s = 0; s < net.variable(var).arity(); ++s) {
    auto with_state = fixed;
    with_state[var] = s;
    per_state[s] = eliminate_all(net, with_state);
  }
  return {std::move(per_state), total};
}

Posterior posterior(const DiscreteNetwork& net, const std::string& variable,
                    const EvidenceProfile& evidence, Engine engine) {
  auto [joints, total] = state_joints(net, variable, evidence, engine);
  Posterior post;
  post.variable = variable;
  post.evidence_probability = total;
  post.defined = total > 0.0;
  if (post.defined) {
    post.probabilities.reserve(joints.size());
    for (double j : joints) post.probabilities.push_back(j / total);
  }
  return post;
}

}  // namespace sensbound
