#include "owa/induction.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "owa/errors.hpp"

namespace owa {

using nlohmann::json;

void TransitionLog::record(const SymbolicState& pre, const SymbolicState& post,
                           const std::string& executor_id,
                           const std::map<std::string, std::string>& binding) {
  entries_.push_back({pre, post, executor_id, binding});
}

std::vector<const SymbolicTransition*> TransitionLog::for_executor(
    const std::string& id) const {
  std::vector<const SymbolicTransition*> out;
  for (const auto& e : entries_)
    if (e.executor_id == id) out.push_back(&e);
  return out;
}

namespace {
json atom_to_json(const Atom& a) {
  json j = json::array();
  j.push_back(a.predicate);
  for (const auto& arg : a.args) j.push_back(arg);
  return j;
}
Atom atom_from_json(const json& j) {
  Atom a;
  a.predicate = j.at(0).get<std::string>();
  for (size_t i = 1; i < j.size(); ++i) a.args.push_back(j[i].get<std::string>());
  return a;
}
json atoms_to_json(const AtomSet& atoms) {
  json arr = json::array();
  for (const auto& a : atoms) arr.push_back(atom_to_json(a));
  return arr;
}
AtomSet atoms_from_json(const json& arr) {
  AtomSet out;
  for (const auto& j : arr) out.insert(atom_from_json(j));
  return out;
}
}  // namespace

std::string TransitionLog::to_jsonl() const {
  std::ostringstream out;
  for (const auto& e : entries_) {
    json j;
    j["executor"] = e.executor_id;
    j["pre"] = atoms_to_json(e.pre.atoms);
    j["post"] = atoms_to_json(e.post.atoms);
    json binding = json::object();
    for (const auto& [var, ent] : e.binding) binding[var] = ent;
    j["binding"] = binding;
    out << j.dump() << "\n";
  }
  return out.str();
}

TransitionLog TransitionLog::from_jsonl(const std::string& text) {
  TransitionLog log;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    SymbolicTransition t;
    t.executor_id = j.at("executor").get<std::string>();
    t.pre.atoms = atoms_from_json(j.at("pre"));
    t.post.atoms = atoms_from_json(j.at("post"));
    for (auto it = j.at("binding").begin(); it != j.at("binding").end(); ++it)
      t.binding[it.key()] = it.value().get<std::string>();
    log.entries_.push_back(std::move(t));
  }
  return log;
}

void TransitionLog::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw FixtureError("cannot write " + path);
  out << to_jsonl();
}

TransitionLog TransitionLog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

namespace {

// entity -> variable, first variable wins when several bind the same entity.
std::map<std::string, std::string> reverse_binding(
    const std::map<std::string, std::string>& binding) {
  std::map<std::string, std::string> rev;
  for (const auto& [var, ent] : binding)
    if (!rev.count(ent)) rev[ent] = var;
  return rev;
}

Atom lift(const Atom& a, const std::map<std::string, std::string>& rev) {
  Atom out = a;
  for (auto& arg : out.args) {
    auto it = rev.find(arg);
    if (it != rev.end()) arg = it->second;
  }
  return out;
}

AtomSet lift_all(const AtomSet& atoms, const std::map<std::string, std::string>& rev) {
  AtomSet out;
  for (const auto& a : atoms) out.insert(lift(a, rev));
  return out;
}

AtomSet set_difference(const AtomSet& a, const AtomSet& b) {
  AtomSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.begin()));
  return out;
}

AtomSet set_intersection(const AtomSet& a, const AtomSet& b) {
  AtomSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.begin()));
  return out;
}

}  // namespace

InduceResult induce_operator(const TransitionLog& log,
                             const std::string& executor_id,
                             const Domain& domain) {
  auto entries = log.for_executor(executor_id);
  if (entries.empty()) return {InduceStatus::InsufficientData, std::nullopt};

  InducedOperator result;
  result.op.name = executor_id;

  // Parameters: sorted variable names with the types of the entities they
  // bind (taken from the first entry; later entries must agree by type).
  for (const auto& [var, ent] : entries.front()->binding) {
    auto t = domain.entity_type(ent);
    if (!t) throw UnknownEntityError("transition binds unknown entity " + ent);
    result.op.params.push_back({var, *t});
  }

  bool first = true;
  AtomSet add, del, pre;
  for (const SymbolicTransition* e : entries) {
    auto rev = reverse_binding(e->binding);
    AtomSet l_add = lift_all(set_difference(e->post.atoms, e->pre.atoms), rev);
    AtomSet l_del = lift_all(set_difference(e->pre.atoms, e->post.atoms), rev);
    AtomSet l_pre;
    for (const auto& a : e->pre.atoms) {
      bool relevant = a.args.empty();  // nullary atoms always qualify
      if (!relevant) {
        relevant = true;
        for (const auto& arg : a.args)
          if (!rev.count(arg)) relevant = false;
      }
      if (relevant) l_pre.insert(lift(a, rev));
    }
    if (first) {
      add = l_add;
      del = l_del;
      pre = l_pre;
      first = false;
    } else {
      add = set_intersection(add, l_add);
      del = set_intersection(del, l_del);
      pre = set_intersection(pre, l_pre);
    }
    std::vector<std::string> tuple;
    for (const auto& p : result.op.params) {
      auto it = e->binding.find(p.var);
      tuple.push_back(it == e->binding.end() ? "" : it->second);
    }
    result.observed_bindings.insert(tuple);
  }

  if (add.empty() && del.empty())
    return {InduceStatus::DegenerateOperator, std::nullopt};

  result.op.preconditions = pre;
  result.op.add_effects = add;
  result.op.delete_effects = del;

  // Support: entries the induced schema fully explains.
  for (const SymbolicTransition* e : entries) {
    AtomSet g_pre, g_add, g_del;
    for (const auto& a : pre) g_pre.insert(substitute(a, e->binding));
    for (const auto& a : add) g_add.insert(substitute(a, e->binding));
    for (const auto& a : del) g_del.insert(substitute(a, e->binding));
    if (!e->pre.entails(g_pre)) continue;
    SymbolicState predicted = e->pre;
    for (const auto& a : g_del) predicted.atoms.erase(a);
    for (const auto& a : g_add) predicted.atoms.insert(a);
    if (predicted == e->post) ++result.support;
  }

  return {InduceStatus::Ok, result};
}

std::vector<InducedOperator> imagine_operators(
    const Domain& domain, const std::vector<InducedOperator>& induced) {
  std::vector<InducedOperator> out;
  for (const auto& io : induced) {
    out.push_back(io);  // the lifted schema itself stays available
    if (io.imagined || io.op.params.empty()) continue;

    std::vector<std::vector<std::string>> candidates;
    bool empty = false;
    for (const auto& p : io.op.params) {
      candidates.push_back(domain.entities_of_type(p.type));
      if (candidates.back().empty()) empty = true;
    }
    if (empty) continue;

    std::vector<size_t> idx(io.op.params.size(), 0);
    bool done = false;
    while (!done) {
      std::vector<std::string> tuple;
      for (size_t i = 0; i < idx.size(); ++i) tuple.push_back(candidates[i][idx[i]]);
      if (!io.observed_bindings.count(tuple)) {
        std::map<std::string, std::string> binding;
        for (size_t i = 0; i < idx.size(); ++i)
          binding[io.op.params[i].var] = tuple[i];
        InducedOperator im;
        im.imagined = true;
        im.support = 0;
        im.op.name = io.op.name;
        for (const auto& e : tuple) im.op.name += "-" + e;
        for (const auto& a : io.op.preconditions)
          im.op.preconditions.insert(substitute(a, binding));
        for (const auto& a : io.op.add_effects)
          im.op.add_effects.insert(substitute(a, binding));
        for (const auto& a : io.op.delete_effects)
          im.op.delete_effects.insert(substitute(a, binding));
        out.push_back(std::move(im));
      }
      size_t i = idx.size();
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

namespace {

// Positional structural equality, parameter names ignored.
bool structurally_equal(const LiftedOperator& a, const LiftedOperator& b) {
  if (a.params.size() != b.params.size()) return false;
  std::map<std::string, std::string> ra, rb;
  for (size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].type != b.params[i].type) return false;
    std::string pos = "?p" + std::to_string(i);
    ra[a.params[i].var] = pos;
    rb[b.params[i].var] = pos;
  }
  auto canon = [](const AtomSet& atoms, const std::map<std::string, std::string>& r) {
    AtomSet out;
    for (const auto& at : atoms) out.insert(substitute(at, r));
    return out;
  };
  return canon(a.preconditions, ra) == canon(b.preconditions, rb) &&
         canon(a.add_effects, ra) == canon(b.add_effects, rb) &&
         canon(a.delete_effects, ra) == canon(b.delete_effects, rb);
}

}  // namespace

Domain merge_into_domain(const Domain& domain,
                         const std::vector<InducedOperator>& operators,
                         int min_support) {
  Domain out = domain;
  std::vector<const InducedOperator*> sorted;
  for (const auto& io : operators)
    if (io.imagined || io.support >= min_support) sorted.push_back(&io);
  std::sort(sorted.begin(), sorted.end(),
            [](const InducedOperator* a, const InducedOperator* b) {
              return a->op.name < b->op.name;
            });

  for (const InducedOperator* io : sorted) {
    bool duplicate = false;
    for (const auto& existing : out.operators)
      if (structurally_equal(existing, io->op)) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;

    LiftedOperator op = io->op;
    std::string base = "learned-" + op.name;
    std::string name = base;
    int suffix = 2;
    while (out.find_operator(name)) name = base + "-" + std::to_string(suffix++);
    op.name = name;
    out.check_operator(op);
    out.operators.push_back(std::move(op));
  }
  std::sort(out.operators.begin(), out.operators.end(),
            [](const LiftedOperator& a, const LiftedOperator& b) {
              return a.name < b.name;
            });
  return out;
}

std::string induced_to_pddl(const std::vector<InducedOperator>& operators) {
  std::ostringstream out;
  for (const auto& io : operators) {
    out << "; support " << io.support << (io.imagined ? ", imagined" : "") << "\n";
    out << "(:action " << io.op.name << "\n  :parameters (";
    for (size_t i = 0; i < io.op.params.size(); ++i) {
      if (i) out << ' ';
      out << io.op.params[i].var << " - " << io.op.params[i].type;
    }
    out << ")\n  :precondition (and";
    for (const auto& a : io.op.preconditions) out << ' ' << a.str();
    out << ")\n  :effect (and";
    for (const auto& a : io.op.add_effects) out << ' ' << a.str();
    for (const auto& a : io.op.delete_effects) out << " (not " << a.str() << ')';
    out << "))\n";
  }
  return out.str();
}

}  // namespace owa
