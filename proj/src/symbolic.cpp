#include "owa/symbolic.hpp"

#include <algorithm>

#include "owa/errors.hpp"

namespace owa {

std::string Atom::str() const {
  std::string out = "(" + predicate;
  for (const auto& a : args) {
    out += ' ';
    out += a;
  }
  out += ')';
  return out;
}

std::string atom_set_str(const AtomSet& atoms) {
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += ' ';
    out += a.str();
  }
  return out;
}

bool SymbolicState::entails(const AtomSet& goal) const {
  return std::includes(atoms.begin(), atoms.end(), goal.begin(), goal.end());
}

std::optional<std::string> Domain::entity_type(const std::string& e) const {
  auto it = entities.find(e);
  if (it == entities.end()) return std::nullopt;
  return it->second;
}

const LiftedOperator* Domain::find_operator(const std::string& opname) const {
  for (const auto& op : operators)
    if (op.name == opname) return &op;
  return nullptr;
}

std::vector<std::string> Domain::entities_of_type(const std::string& type) const {
  std::vector<std::string> out;
  for (const auto& [name, t] : entities)
    if (t == type) out.push_back(name);
  return out;  // map iteration is already sorted by name
}

void Domain::check_atom(const Atom& a,
                        const std::map<std::string, std::string>& vars) const {
  auto pit = predicates.find(a.predicate);
  if (pit == predicates.end())
    throw TypeError("undeclared predicate '" + a.predicate + "'");
  const auto& ptypes = pit->second;
  if (ptypes.size() != a.args.size())
    throw TypeError("predicate '" + a.predicate + "' expects " +
                    std::to_string(ptypes.size()) + " arguments, got " +
                    std::to_string(a.args.size()));
  for (size_t i = 0; i < a.args.size(); ++i) {
    const std::string& arg = a.args[i];
    std::string argtype;
    if (!arg.empty() && arg[0] == '?') {
      auto vit = vars.find(arg);
      if (vit == vars.end())
        throw TypeError("variable '" + arg + "' not bound by any parameter");
      argtype = vit->second;
    } else {
      auto et = entity_type(arg);
      if (!et)
        throw UnknownEntityError("unknown entity '" + arg + "'");
      argtype = *et;
    }
    if (argtype != ptypes[i])
      throw TypeError("argument " + std::to_string(i + 1) + " of '" +
                      a.predicate + "' must have type " + ptypes[i] +
                      ", got " + argtype);
  }
}

void Domain::check_operator(const LiftedOperator& op) const {
  std::map<std::string, std::string> vars;
  for (const auto& p : op.params) {
    if (!has_type(p.type))
      throw TypeError("operator '" + op.name + "': unknown type '" + p.type + "'");
    if (vars.count(p.var))
      throw DuplicateNameError("operator '" + op.name + "': duplicate parameter '" +
                               p.var + "'");
    vars[p.var] = p.type;
  }
  auto check_all = [&](const AtomSet& atoms) {
    for (const auto& a : atoms) check_atom(a, vars);
  };
  check_all(op.preconditions);
  check_all(op.add_effects);
  check_all(op.delete_effects);
  for (const auto& a : op.add_effects)
    if (op.delete_effects.count(a))
      throw TypeError("operator '" + op.name +
                      "': atom both added and deleted: " + a.str());
}

Atom substitute(const Atom& a, const std::map<std::string, std::string>& binding) {
  Atom out = a;
  for (auto& arg : out.args) {
    if (!arg.empty() && arg[0] == '?') {
      auto it = binding.find(arg);
      if (it != binding.end()) arg = it->second;
    }
  }
  return out;
}

GroundOperator ground(const LiftedOperator& op,
                      const std::map<std::string, std::string>& binding,
                      const Domain& domain) {
  GroundOperator g;
  g.schema = op.name;
  g.binding = binding;
  g.key = "(" + op.name;
  for (const auto& p : op.params) {
    auto it = binding.find(p.var);
    if (it == binding.end())
      throw TypeError("binding for '" + op.name + "' misses parameter " + p.var);
    auto et = domain.entity_type(it->second);
    if (!et)
      throw UnknownEntityError("unknown entity '" + it->second + "'");
    if (*et != p.type)
      throw TypeError("binding for '" + op.name + "': " + p.var +
                      " requires type " + p.type + ", got " + *et);
    g.key += ' ';
    g.key += it->second;
  }
  g.key += ')';
  for (const auto& a : op.preconditions) g.pre.insert(substitute(a, binding));
  for (const auto& a : op.add_effects) g.add.insert(substitute(a, binding));
  for (const auto& a : op.delete_effects) g.del.insert(substitute(a, binding));
  return g;
}

std::vector<GroundOperator> ground_operators(const Domain& domain) {
  std::vector<GroundOperator> out;
  std::vector<const LiftedOperator*> ops;
  for (const auto& op : domain.operators) ops.push_back(&op);
  std::sort(ops.begin(), ops.end(),
            [](const LiftedOperator* a, const LiftedOperator* b) {
              return a->name < b->name;
            });

  for (const LiftedOperator* op : ops) {
    std::vector<std::vector<std::string>> candidates;
    bool empty = false;
    for (const auto& p : op->params) {
      candidates.push_back(domain.entities_of_type(p.type));
      if (candidates.back().empty()) empty = true;
    }
    if (empty) continue;

    std::vector<size_t> idx(op->params.size(), 0);
    bool done = false;
    while (!done) {
      std::map<std::string, std::string> binding;
      for (size_t i = 0; i < op->params.size(); ++i)
        binding[op->params[i].var] = candidates[i][idx[i]];
      out.push_back(ground(*op, binding, domain));
      if (op->params.empty()) break;
      // Odometer, last position fastest: enumeration is lexicographic in
      // the bound entity names, parameter order.
      size_t i = op->params.size();
      while (true) {
        if (i == 0) {
          done = true;
          break;
        }
        --i;
        if (++idx[i] < candidates[i].size()) break;
        idx[i] = 0;
      }
    }
  }
  return out;
}

bool applicable(const SymbolicState& state, const GroundOperator& op) {
  return state.entails(op.pre);
}

SymbolicState apply(const SymbolicState& state, const GroundOperator& op) {
  if (!applicable(state, op))
    throw NotApplicableError("operator " + op.key + " not applicable");
  SymbolicState out = state;
  for (const auto& a : op.del) out.atoms.erase(a);
  for (const auto& a : op.add) out.atoms.insert(a);
  return out;
}

bool entails(const SymbolicState& state, const AtomSet& goal) {
  return state.entails(goal);
}

}  // namespace owa
