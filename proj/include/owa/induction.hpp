#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "owa/symbolic.hpp"

namespace owa {

// One observed symbolic transition, attributed to an executor. The binding
// maps variable roles (e.g. "?o") to the entities the execution was about;
// it may be empty for free exploration.
struct SymbolicTransition {
  SymbolicState pre;
  SymbolicState post;
  std::string executor_id;
  std::map<std::string, std::string> binding;
};

// Append-only, insertion-ordered. Induction reads a snapshot per executor.
class TransitionLog {
 public:
  void record(const SymbolicState& pre, const SymbolicState& post,
              const std::string& executor_id,
              const std::map<std::string, std::string>& binding = {});

  const std::vector<SymbolicTransition>& entries() const { return entries_; }
  std::vector<const SymbolicTransition*> for_executor(const std::string& id) const;

  // JSON-lines persistence, one transition per line.
  std::string to_jsonl() const;
  static TransitionLog from_jsonl(const std::string& text);
  void save(const std::string& path) const;
  static TransitionLog load(const std::string& path);

 private:
  std::vector<SymbolicTransition> entries_;
};

struct InducedOperator {
  LiftedOperator op;
  int support = 0;
  bool imagined = false;
  // Observed binding tuples in parameter order, consumed by imagination.
  std::set<std::vector<std::string>> observed_bindings;
};

enum class InduceStatus { Ok, InsufficientData, DegenerateOperator };

struct InduceResult {
  InduceStatus status = InduceStatus::InsufficientData;
  std::optional<InducedOperator> induced;

  bool ok() const { return status == InduceStatus::Ok; }
};

// Conservative intersection induction over all entries for an executor:
//   add    = intersection of lifted (post \ pre)
//   delete = intersection of lifted (pre \ post)
//   pre    = intersection of lifted pre atoms whose every argument is a
//            bound entity, plus nullary atoms present in every pre
// Atoms are lifted by replacing bound entities with their typed variables.
// Support counts entries fully explained by the induced schema. The
// operator is named after the executor id.
InduceResult induce_operator(const TransitionLog& log, const std::string& executor_id,
                             const Domain& domain);

// For every non-imagined induced operator, emits ground-specialized
// variants for each type-consistent total binding not yet observed
// (imagined = true, support 0). The lifted originals are included in the
// output for planner use.
std::vector<InducedOperator> imagine_operators(
    const Domain& domain, const std::vector<InducedOperator>& induced);

// Adds operators with support >= min_support or imagined = true under
// fresh names ("learned-<name>", numeric suffix on collision). Operators
// structurally identical to one already in the domain are skipped, so the
// merge is idempotent. The input domain is left unmodified.
Domain merge_into_domain(const Domain& domain,
                         const std::vector<InducedOperator>& operators,
                         int min_support = 1);

// Induced operators rendered in the domain syntax, for inspection.
std::string induced_to_pddl(const std::vector<InducedOperator>& operators);

}  // namespace owa
