#include "sensbound/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "sensbound/errors.hpp"

namespace sensbound {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string join_findings(const std::vector<std::string>& findings) {
  std::ostringstream os;
  os << "invalid network (" << findings.size()
     << (findings.size() == 1 ? " finding)" : " findings)");
  for (const auto& f : findings) os << "\n  - " << f;
  return os.str();
}

}  // namespace

int Variable::state_index(std::string_view state) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == state) return static_cast<int>(i);
  return -1;
}

void EvidenceProfile::observe(std::string variable, int state) {
  if (observes(variable))
    throw std::invalid_argument("variable '" + variable + "' observed twice");
  obs_.emplace_back(std::move(variable), state);
}

std::optional<int> EvidenceProfile::state_of(std::string_view variable) const {
  for (const auto& [name, state] : obs_)
    if (name == variable) return state;
  return std::nullopt;
}

DiscreteNetwork::DiscreteNetwork(std::vector<Variable> variables,
                                 std::vector<std::vector<int>> parents,
                                 std::vector<std::vector<std::vector<double>>> cpts)
    : vars_(std::move(variables)), parents_(std::move(parents)), cpt_(std::move(cpts)) {
  std::vector<std::string> findings;
  const int n = static_cast<int>(vars_.size());

  if (n == 0) findings.push_back("network has no variables");
  for (int i = 0; i < n; ++i) {
    const Variable& v = vars_[i];
    if (v.name.empty()) findings.push_back("variable at position " + std::to_string(i) + " has an empty name");
    if (v.arity() < 2)
      findings.push_back("variable '" + v.name + "' needs at least 2 states");
    for (int a = 0; a < v.arity(); ++a)
      for (int b = a + 1; b < v.arity(); ++b)
        if (v.states[a] == v.states[b])
          findings.push_back("variable '" + v.name + "' repeats state '" + v.states[a] + "'");
    for (int j = i + 1; j < n; ++j)
      if (vars_[j].name == v.name)
        findings.push_back("variable name '" + v.name + "' is not unique");
  }

  if (static_cast<int>(parents_.size()) != n || static_cast<int>(cpt_.size()) != n)
    throw ValidationError("internal: parents/cpt lists must match the variable count");

  for (int i = 0; i < n; ++i) {
    for (int p : parents_[i]) {
      if (p < 0 || p >= n) {
        findings.push_back("node '" + vars_[i].name + "' has an out-of-range parent index");
        continue;
      }
      if (p == i) findings.push_back("node '" + vars_[i].name + "' lists itself as a parent");
    }
    for (std::size_t a = 0; a < parents_[i].size(); ++a)
      for (std::size_t b = a + 1; b < parents_[i].size(); ++b)
        if (parents_[i][a] == parents_[i][b] && parents_[i][a] >= 0 && parents_[i][a] < n)
          findings.push_back("node '" + vars_[i].name + "' lists parent '" +
                             vars_[parents_[i][a]].name + "' twice");
  }

  if (!findings.empty()) throw ValidationError(join_findings(findings));

  // Acyclicity via Kahn's algorithm.
  {
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i)
      for (int p : parents_[i]) {
        children[p].push_back(i);
        ++indegree[i];
      }
    std::deque<int> ready;
    for (int i = 0; i < n; ++i)
      if (indegree[i] == 0) ready.push_back(i);
    int emitted = 0;
    while (!ready.empty()) {
      int v = ready.front();
      ready.pop_front();
      ++emitted;
      for (int c : children[v])
        if (--indegree[c] == 0) ready.push_back(c);
    }
    if (emitted != n) {
      for (int i = 0; i < n; ++i)
        if (indegree[i] > 0)
          findings.push_back("node '" + vars_[i].name + "' lies on a directed cycle");
      throw ValidationError(join_findings(findings));
    }
  }

  // CPT shapes, entry ranges and row sums; rows are renormalized afterwards.
  for (int i = 0; i < n; ++i) {
    std::uint64_t expected_rows = 1;
    for (int p : parents_[i]) expected_rows *= static_cast<std::uint64_t>(vars_[p].arity());
    if (cpt_[i].size() != expected_rows) {
      findings.push_back("node '" + vars_[i].name + "' has " + std::to_string(cpt_[i].size()) +
                         " cpt rows, expected " + std::to_string(expected_rows));
      continue;
    }
    for (std::size_t r = 0; r < cpt_[i].size(); ++r) {
      const auto& row = cpt_[i][r];
      if (static_cast<int>(row.size()) != vars_[i].arity()) {
        findings.push_back("node '" + vars_[i].name + "' cpt row " + std::to_string(r) +
                           " has " + std::to_string(row.size()) + " entries, expected " +
                           std::to_string(vars_[i].arity()));
        continue;
      }
      double sum = 0.0;
      bool range_ok = true;
      for (double e : row) {
        if (!(e >= 0.0 && e <= 1.0)) range_ok = false;
        sum += e;
      }
      if (!range_ok)
        findings.push_back("node '" + vars_[i].name + "' cpt row " + std::to_string(r) +
                           " has an entry outside [0, 1]");
      else if (std::abs(sum - 1.0) > kRowSumLoadTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "node '" << vars_[i].name << "' cpt row " << r << " sums to " << sum
           << " (expected 1 within " << kRowSumLoadTolerance << ")";
        findings.push_back(os.str());
      }
    }
  }
  if (!findings.empty()) throw ValidationError(join_findings(findings));

  for (int i = 0; i < n; ++i)
    for (auto& row : cpt_[i]) {
      double sum = 0.0;
      for (double e : row) sum += e;
      for (double& e : row) e /= sum;
    }

  // Descendant closure (improper: every node is its own descendant).
  descendants_.assign(n, std::vector<bool>(n, false));
  std::vector<std::vector<int>> children(n);
  for (int i = 0; i < n; ++i)
    for (int p : parents_[i]) children[p].push_back(i);
  for (int start = 0; start < n; ++start) {
    std::vector<int> stack{start};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (descendants_[start][v]) continue;
      descendants_[start][v] = true;
      for (int c : children[v]) stack.push_back(c);
    }
  }
}

int DiscreteNetwork::index_of(std::string_view name) const {
  for (int i = 0; i < node_count(); ++i)
    if (vars_[i].name == name) return i;
  return -1;
}

int DiscreteNetwork::require_index(std::string_view name) const {
  int idx = index_of(name);
  if (idx < 0) throw std::out_of_range("unknown variable '" + std::string(name) + "'");
  return idx;
}

int DiscreteNetwork::row_index(int node, std::span<const int> parent_states) const {
  const auto& ps = parents_[node];
  if (parent_states.size() != ps.size())
    throw std::out_of_range("node '" + vars_[node].name + "' expects " +
                            std::to_string(ps.size()) + " parent states, got " +
                            std::to_string(parent_states.size()));
  int row = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    int arity = vars_[ps[i]].arity();
    int s = parent_states[i];
    if (s < 0 || s >= arity)
      throw std::out_of_range("state index " + std::to_string(s) + " out of range for parent '" +
                              vars_[ps[i]].name + "'");
    row = row * arity + s;
  }
  return row;
}

std::vector<int> DiscreteNetwork::row_config(int node, int row) const {
  const auto& ps = parents_[node];
  std::vector<int> config(ps.size(), 0);
  for (int i = static_cast<int>(ps.size()) - 1; i >= 0; --i) {
    int arity = vars_[ps[i]].arity();
    config[i] = row % arity;
    row /= arity;
  }
  return config;
}

bool DiscreteNetwork::is_descendant(int node, int other) const {
  return descendants_[node][other];
}

std::uint64_t DiscreteNetwork::joint_assignment_count() const {
  std::uint64_t count = 1;
  for (const auto& v : vars_) {
    if (__builtin_mul_overflow(count, static_cast<std::uint64_t>(v.arity()), &count))
      return UINT64_MAX;
  }
  return count;
}

DiscreteNetwork::ResolvedParameter DiscreteNetwork::resolve(const ParameterRef& pref) const {
  int node = require_index(pref.node);
  if (pref.state_index < 0 || pref.state_index >= vars_[node].arity())
    throw std::out_of_range("state index " + std::to_string(pref.state_index) +
                            " out of range for node '" + pref.node + "'");
  int row = row_index(node, pref.parent_states);
  return {node, row, pref.state_index};
}

DiscreteNetwork load_network(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed network document: ") + e.what());
  }

  try {
    if (!doc.is_object()) throw ParseError("malformed network document: top level must be an object");
    for (const auto& [key, _] : doc.items())
      if (key != "variables" && key != "parents" && key != "cpt")
        throw ParseError("malformed network document: unknown key '" + key + "'");
    if (!doc.contains("variables") || !doc["variables"].is_array())
      throw ParseError("malformed network document: missing 'variables' array");

    std::vector<Variable> vars;
    for (const auto& v : doc["variables"]) {
      if (!v.is_object() || !v.contains("name") || !v.contains("states") ||
          !v["name"].is_string() || !v["states"].is_array())
        throw ParseError("malformed network document: each variable needs a name and a states list");
      Variable var;
      var.name = v["name"].get<std::string>();
      for (const auto& s : v["states"]) {
        if (!s.is_string()) throw ParseError("malformed network document: state names must be strings");
        var.states.push_back(s.get<std::string>());
      }
      vars.push_back(std::move(var));
    }

    auto index_of = [&vars](const std::string& name) {
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name) return static_cast<int>(i);
      return -1;
    };

    std::vector<std::vector<int>> parents(vars.size());
    if (doc.contains("parents")) {
      if (!doc["parents"].is_object())
        throw ParseError("malformed network document: 'parents' must be an object");
      for (const auto& [node, list] : doc["parents"].items()) {
        int idx = index_of(node);
        if (idx < 0) throw ValidationError("parents given for unknown node '" + node + "'");
        if (!list.is_array())
          throw ParseError("malformed network document: parent list of '" + node + "' must be an array");
        for (const auto& p : list) {
          if (!p.is_string())
            throw ParseError("malformed network document: parent names must be strings");
          int pidx = index_of(p.get<std::string>());
          if (pidx < 0)
            throw ValidationError("node '" + node + "' names unknown parent '" +
                                  p.get<std::string>() + "'");
          parents[idx].push_back(pidx);
        }
      }
    }

    std::vector<std::vector<std::vector<double>>> cpts(vars.size());
    if (!doc.contains("cpt") || !doc["cpt"].is_object())
      throw ParseError("malformed network document: missing 'cpt' object");
    for (const auto& [node, rows] : doc["cpt"].items()) {
      int idx = index_of(node);
      if (idx < 0) throw ValidationError("cpt given for unknown node '" + node + "'");
      if (!rows.is_array())
        throw ParseError("malformed network document: cpt of '" + node + "' must be an array of rows");
      for (const auto& row : rows) {
        if (!row.is_array())
          throw ParseError("malformed network document: cpt rows of '" + node + "' must be arrays");
        std::vector<double> r;
        for (const auto& e : row) {
          if (!e.is_number())
            throw ParseError("malformed network document: cpt entries of '" + node + "' must be numbers");
          r.push_back(e.get<double>());
        }
        cpts[idx].push_back(std::move(r));
      }
    }
    for (std::size_t i = 0; i < vars.size(); ++i)
      if (cpts[i].empty()) throw ValidationError("missing cpt for node '" + vars[i].name + "'");

    return DiscreteNetwork(std::move(vars), std::move(parents), std::move(cpts));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed network document: ") + e.what());
  }
}

DiscreteNetwork load_network_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_network(buffer.str());
}

std::string save_network(const DiscreteNetwork& net, int indent) {
  ordered_json doc;
  doc["variables"] = ordered_json::array();
  for (const auto& v : net.variables())
    doc["variables"].push_back({{"name", v.name}, {"states", v.states}});
  ordered_json parents = ordered_json::object();
  for (int i = 0; i < net.node_count(); ++i) {
    if (net.parents(i).empty()) continue;
    ordered_json list = ordered_json::array();
    for (int p : net.parents(i)) list.push_back(net.variable(p).name);
    parents[net.variable(i).name] = std::move(list);
  }
  if (!parents.empty()) doc["parents"] = std::move(parents);
  ordered_json cpt = ordered_json::object();
  for (int i = 0; i < net.node_count(); ++i) cpt[net.variable(i).name] = net.cpt(i);
  doc["cpt"] = std::move(cpt);
  return doc.dump(indent) + "\n";
}

double parameter_value(const DiscreteNetwork& net, const ParameterRef& pref) {
  auto [node, row, state] = net.resolve(pref);
  return net.cpt(node)[row][state];
}

DiscreteNetwork apply_parameter(const DiscreteNetwork& net, const ParameterRef& pref, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("parameter value " + std::to_string(x) + " outside [0, 1]");
  auto [node, row, state] = net.resolve(pref);
  const auto& original = net.cpt(node)[row];

  double siblings = 0.0;
  for (int j = 0; j < static_cast<int>(original.size()); ++j)
    if (j != state) siblings += original[j];
  if (original[state] >= 1.0 || siblings <= 0.0)
    throw std::domain_error("degenerate row: p(" + net.variable(node).states[state] + " | row " +
                            std::to_string(row) + ") of node '" + pref.node +
                            "' is 1; no sibling mass to co-vary");

  DiscreteNetwork out = net;
  auto& target_row = out.cpt_[node][row];
  const double scale = (1.0 - x) / siblings;
  for (int j = 0; j < static_cast<int>(target_row.size()); ++j)
    target_row[j] = (j == state) ? x : original[j] * scale;
  return out;
}

void validate_evidence(const DiscreteNetwork& net, const EvidenceProfile& evidence) {
  for (const auto& [name, state] : evidence.observations()) {
    int idx = net.require_index(name);
    if (state < 0 || state >= net.variable(idx).arity())
      throw std::out_of_range("state index " + std::to_string(state) +
                              " out of range for observed variable '" + name + "'");
  }
}

ProfileEnumeration enumerate_profiles(const DiscreteNetwork& net,
                                      std::span<const std::string> observables,
                                      std::uint64_t cap) {
  std::vector<int> idx;
  for (const auto& name : observables) {
    int i = net.require_index(name);
    if (std::find(idx.begin(), idx.end(), i) != idx.end())
      throw std::invalid_argument("observable '" + name + "' listed twice");
    idx.push_back(i);
  }

  ProfileEnumeration result;
  result.count = 1;
  for (int i : idx) {
    if (__builtin_mul_overflow(result.count, static_cast<std::uint64_t>(net.variable(i).arity()),
                               &result.count)) {
      result.count = UINT64_MAX;
      return result;  // beyond any sane cap
    }
  }
  if (result.count > cap) return result;

  result.materialized = true;
  result.profiles.reserve(result.count);
  const int k = static_cast<int>(idx.size());
  for (std::uint64_t p = 0; p < result.count; ++p) {
    std::vector<int> states(k, 0);
    std::uint64_t rest = p;
    for (int i = k - 1; i >= 0; --i) {  // last listed variable varies fastest
      int arity = net.variable(idx[i]).arity();
      states[i] = static_cast<int>(rest % arity);
      rest /= arity;
    }
    EvidenceProfile profile;
    for (int i = 0; i < k; ++i) profile.observe(net.variable(idx[i]).name, states[i]);
    result.profiles.push_back(std::move(profile));
  }
  return result;
}

}  // namespace sensbound
