#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace owa {

// An atom is a predicate applied to terms. Terms starting with '?' are
// variables; anything else names an entity. Ordering is lexicographic by
// predicate then arguments, which is the canonical atom order used for
// serialization, hashing and deterministic iteration everywhere.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;

  bool is_ground() const {
    for (const auto& a : args)
      if (!a.empty() && a[0] == '?') return false;
    return true;
  }

  std::string str() const;
};

using AtomSet = std::set<Atom>;

std::string atom_set_str(const AtomSet& atoms);

// A symbolic state is a finite set of ground atoms.
struct SymbolicState {
  AtomSet atoms;

  auto operator<=>(const SymbolicState&) const = default;

  bool contains(const Atom& a) const { return atoms.count(a) > 0; }
  bool entails(const AtomSet& goal) const;
  std::string key() const { return atom_set_str(atoms); }
};

struct TypedParam {
  std::string var;   // "?x"
  std::string type;  // entity type name

  auto operator<=>(const TypedParam&) const = default;
};

// Action schema with positive preconditions and add/delete effects.
struct LiftedOperator {
  std::string name;
  std::vector<TypedParam> params;
  AtomSet preconditions;
  AtomSet add_effects;
  AtomSet delete_effects;

  auto operator<=>(const LiftedOperator&) const = default;
};

// Typed STRIPS domain. Entities are declared at domain level; problems may
// only reference them.
struct Domain {
  std::string name;
  std::set<std::string> types;
  std::map<std::string, std::string> entities;                // name -> type
  std::map<std::string, std::vector<std::string>> predicates; // name -> param types
  std::vector<LiftedOperator> operators;                      // sorted by name

  auto operator<=>(const Domain&) const = default;

  bool has_type(const std::string& t) const { return types.count(t) > 0; }
  std::optional<std::string> entity_type(const std::string& e) const;
  const LiftedOperator* find_operator(const std::string& name) const;

  // Entities of a type, sorted by name.
  std::vector<std::string> entities_of_type(const std::string& type) const;

  // Throws TypeError if the atom is ill-typed. vars gives the types of any
  // variables in scope (operator parameters); ground atoms need none.
  void check_atom(const Atom& a,
                  const std::map<std::string, std::string>& vars = {}) const;

  // Throws on malformed schema: unknown types, variables outside the
  // parameter list, overlapping add/delete effects.
  void check_operator(const LiftedOperator& op) const;
};

// One total, type-correct binding of a schema. The grounded precondition
// and effect sets are materialized once at construction.
struct GroundOperator {
  std::string schema;
  std::map<std::string, std::string> binding;  // var -> entity
  AtomSet pre;
  AtomSet add;
  AtomSet del;

  // "(goto Q0 Q1)"; also the executor-library key.
  std::string key;

  auto operator<=>(const GroundOperator&) const = default;
};

struct PlanningTask {
  std::string name;
  Domain domain;
  SymbolicState initial;
  AtomSet goal;
};

// Substitutes a binding into an atom. Unbound variables are left intact.
Atom substitute(const Atom& a, const std::map<std::string, std::string>& binding);

// Binds a schema; throws TypeError on a partial or ill-typed binding.
GroundOperator ground(const LiftedOperator& op,
                      const std::map<std::string, std::string>& binding,
                      const Domain& domain);

// Every type-consistent total binding of every schema, ordered by operator
// name then bound entity names. Independent of entity declaration order.
std::vector<GroundOperator> ground_operators(const Domain& domain);

bool applicable(const SymbolicState& state, const GroundOperator& op);

// STRIPS progression: (state \ del) u add. Throws NotApplicableError.
SymbolicState apply(const SymbolicState& state, const GroundOperator& op);

bool entails(const SymbolicState& state, const AtomSet& goal);

}  // namespace owa
