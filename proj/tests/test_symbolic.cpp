#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "owa/errors.hpp"
#include "owa/parser.hpp"
#include "owa/symbolic.hpp"
#include "test_util.hpp"

using namespace owa;
using namespace owa::test;

TEST_CASE("minimal domain: one type, one nullary predicate, zero operators") {
  Domain d = parse_domain(R"(
    (define (domain tiny)
      (:types thing)
      (:constants a - thing)
      (:predicates (flag)))
  )");
  CHECK(d.name == "tiny");
  CHECK(d.operators.empty());
  CHECK(d.predicates.at("flag").empty());
}

TEST_CASE("gridcan domain fixture has the four operators") {
  Domain d = load_fixture_domain();
  CHECK(d.operators.size() == 4);
  CHECK(d.find_operator("goto") != nullptr);
  CHECK(d.find_operator("pick") != nullptr);
  CHECK(d.find_operator("place") != nullptr);
  CHECK(d.find_operator("toggle-switch") != nullptr);
}

TEST_CASE("wrong arity in an operator precondition is a TypeError") {
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain bad)
      (:types thing)
      (:constants a - thing)
      (:predicates (holding ?o - thing))
      (:action grab
        :parameters (?o - thing)
        :precondition (and (holding ?o ?o))
        :effect (and (holding ?o))))
  )"),
                  TypeError);
}

TEST_CASE("undeclared predicate and type errors") {
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain bad)
      (:types thing)
      (:constants a - thing)
      (:predicates (f ?o - thing))
      (:action go
        :parameters (?o - thing)
        :precondition (and (g ?o))
        :effect (and (f ?o))))
  )"),
                  TypeError);
  CHECK_THROWS_AS(parse_domain("(define (domain bad) (:types) (:constants a - ghost))"),
                  TypeError);
}

TEST_CASE("duplicate names are rejected") {
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain bad)
      (:types thing thing))
  )"),
                  DuplicateNameError);
  CHECK_THROWS_AS(parse_domain(R"(
    (define (domain bad)
      (:types thing)
      (:predicates (f ?o - thing) (f ?o - thing)))
  )"),
                  DuplicateNameError);
}

TEST_CASE("syntax errors carry line information") {
  try {
    parse_domain("(define (domain x)\n  (:types a\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 1);
  }
}

TEST_CASE("problem with empty goal is satisfied by any state") {
  Domain d = parse_domain(R"(
    (define (domain tiny)
      (:types thing)
      (:constants a - thing)
      (:predicates (flag)))
  )");
  PlanningTask t = parse_problem(R"(
    (define (problem p) (:domain tiny) (:init) (:goal (and)))
  )", d);
  CHECK(t.goal.empty());
  CHECK(SymbolicState{}.entails(t.goal));
  CHECK(entails(SymbolicState{{Atom{"flag", {}}}}, t.goal));
}

TEST_CASE("gridcan problem fixture goal is in(can bin)") {
  Domain d = load_fixture_domain();
  PlanningTask t = load_fixture_problem(d);
  AtomSet expected{Atom{"in", {"can", "bin"}}};
  CHECK(t.goal == expected);
  CHECK(t.initial.contains(Atom{"at-agent", {"Q0"}}));
  CHECK(t.initial.contains(Atom{"at", {"can", "Q1"}}));
}

TEST_CASE("problem naming an unknown entity is an UnknownEntityError") {
  Domain d = load_fixture_domain();
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem p) (:domain gridcan)
      (:init (at-agent Q0) (holding banana))
      (:goal (and (in can bin))))
  )", d),
                  UnknownEntityError);
  CHECK_THROWS_AS(parse_problem(R"(
    (define (problem p) (:domain gridcan)
      (:objects banana - item)
      (:init) (:goal (and)))
  )", d),
                  UnknownEntityError);
}

TEST_CASE("grounding: nullary schema gives exactly one instance") {
  Domain d = parse_domain(R"(
    (define (domain g)
      (:types thing)
      (:constants a b - thing)
      (:predicates (flag))
      (:action fire
        :parameters ()
        :precondition (and)
        :effect (and (flag))))
  )");
  auto ops = ground_operators(d);
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].key == "(fire)");
  CHECK(ops[0].binding.empty());
}

TEST_CASE("grounding: 3 x 2 typed product gives 6 instances") {
  Domain d = parse_domain(R"(
    (define (domain g)
      (:types ta tb)
      (:constants a1 a2 a3 - ta b1 b2 - tb)
      (:predicates (rel ?x - ta ?y - tb))
      (:action link
        :parameters (?x - ta ?y - tb)
        :precondition (and)
        :effect (and (rel ?x ?y))))
  )");
  auto ops = ground_operators(d);
  CHECK(ops.size() == 6);
  CHECK(ops.front().key == "(link a1 b1)");
  CHECK(ops.back().key == "(link a3 b2)");
}

TEST_CASE("gridcan ground-operator count matches a brute-force enumerator") {
  Domain d = load_fixture_domain();
  auto ops = ground_operators(d);

  // Independent enumeration: product of per-type entity counts per schema.
  size_t expected = 0;
  for (const auto& op : d.operators) {
    size_t combos = 1;
    for (const auto& p : op.params) combos *= d.entities_of_type(p.type).size();
    expected += combos;
  }
  CHECK(ops.size() == expected);
  CHECK(expected == 16 + 4 + 4 + 8);  // goto, pick, place, toggle-switch
}

TEST_CASE("grounding is independent of entity declaration order") {
  Domain a = parse_domain(R"(
    (define (domain g) (:types t)
      (:constants x y z - t)
      (:predicates (p ?a - t))
      (:action act :parameters (?a - t) :precondition (and) :effect (and (p ?a))))
  )");
  Domain b = parse_domain(R"(
    (define (domain g) (:types t)
      (:constants z x y - t)
      (:predicates (p ?a - t))
      (:action act :parameters (?a - t) :precondition (and) :effect (and (p ?a))))
  )");
  auto ka = ground_operators(a);
  auto kb = ground_operators(b);
  REQUIRE(ka.size() == kb.size());
  for (size_t i = 0; i < ka.size(); ++i) CHECK(ka[i].key == kb[i].key);
}

TEST_CASE("applicability") {
  Domain d = load_fixture_domain();
  PlanningTask t = load_fixture_problem(d);
  auto ops = ground_operators(d);
  auto find = [&](const std::string& key) -> const GroundOperator& {
    for (const auto& op : ops)
      if (op.key == key) return op;
    FAIL("missing operator");
    return ops[0];
  };

  SUBCASE("empty preconditions are always applicable") {
    Domain g = parse_domain(R"(
      (define (domain g) (:types t) (:constants a - t) (:predicates (p ?x - t))
        (:action act :parameters () :precondition (and) :effect (and (p a))))
    )");
    auto gops = ground_operators(g);
    CHECK(applicable(SymbolicState{}, gops[0]));
  }

  SUBCASE("pick(can Q1) applicable only when the agent shares the region") {
    const auto& pick_q1 = find("(pick can Q1)");
    CHECK_FALSE(applicable(t.initial, pick_q1));  // agent starts in Q0
    SymbolicState moved = t.initial;
    moved.atoms.erase(Atom{"at-agent", {"Q0"}});
    moved.atoms.insert(Atom{"at-agent", {"Q1"}});
    CHECK(applicable(moved, pick_q1));
  }

  SUBCASE("missing one precondition atom makes it inapplicable") {
    const auto& goto01 = find("(goto Q0 Q1)");
    CHECK(applicable(t.initial, goto01));
    SymbolicState dark = t.initial;
    dark.atoms.erase(Atom{"door-open", {}});
    CHECK_FALSE(applicable(dark, goto01));
  }
}

TEST_CASE("apply: empty effects, inversion, and error") {
  Domain d = parse_domain(R"(
    (define (domain g) (:types t) (:constants a - t)
      (:predicates (p ?x - t) (q ?x - t))
      (:action noop :parameters () :precondition (and) :effect (and))
      (:action flip :parameters (?x - t)
        :precondition (and (p ?x)) :effect (and (q ?x) (not (p ?x))))
      (:action unflip :parameters (?x - t)
        :precondition (and (q ?x)) :effect (and (p ?x) (not (q ?x)))))
  )");
  auto ops = ground_operators(d);
  REQUIRE(ops.size() == 3);  // flip a, noop, unflip a
  SymbolicState s{{Atom{"p", {"a"}}}};

  const GroundOperator& noop = ops[1];
  CHECK(noop.schema == "noop");
  CHECK(apply(s, noop) == s);

  const GroundOperator& flip = ops[0];
  const GroundOperator& unflip = ops[2];
  SymbolicState flipped = apply(s, flip);
  CHECK(flipped.contains(Atom{"q", {"a"}}));
  CHECK_FALSE(flipped.contains(Atom{"p", {"a"}}));
  CHECK(apply(flipped, unflip) == s);

  CHECK_THROWS_AS(apply(flipped, flip), NotApplicableError);
}

TEST_CASE("apply agrees with an independent set-algebra oracle on 1000 random pairs") {
  Rng rng(42);
  int tested = 0;
  while (tested < 1000) {
    Domain d = random_domain(rng);
    auto ops = ground_operators(d);
    if (ops.empty()) continue;
    for (int i = 0; i < 20 && tested < 1000; ++i) {
      SymbolicState s = random_state(rng, d);
      const GroundOperator& op = ops[rng.uniform_int(ops.size())];
      if (!applicable(s, op)) {
        // Force applicability by adding the preconditions.
        SymbolicState forced = s;
        for (const auto& a : op.pre) forced.atoms.insert(a);
        s = forced;
      }
      SymbolicState got = apply(s, op);

      // Straight-line oracle: sorted vectors, set_difference + set_union.
      std::vector<Atom> state_vec(s.atoms.begin(), s.atoms.end());
      std::vector<Atom> del_vec(op.del.begin(), op.del.end());
      std::vector<Atom> add_vec(op.add.begin(), op.add.end());
      std::vector<Atom> removed, result_vec;
      std::set_difference(state_vec.begin(), state_vec.end(), del_vec.begin(),
                          del_vec.end(), std::back_inserter(removed));
      std::set_union(removed.begin(), removed.end(), add_vec.begin(), add_vec.end(),
                     std::back_inserter(result_vec));
      SymbolicState expected;
      expected.atoms.insert(result_vec.begin(), result_vec.end());
      CHECK(got == expected);

      // Progression invariants.
      CHECK(entails(got, op.add));
      CHECK(got.atoms.size() <= s.atoms.size() + op.add.size());
      ++tested;
    }
  }
}

TEST_CASE("entails basics") {
  SymbolicState s{{Atom{"a", {}}, Atom{"b", {}}}};
  CHECK(entails(s, {}));
  CHECK(entails(s, s.atoms));
  CHECK_FALSE(entails(s, {Atom{"a", {}}, Atom{"c", {}}}));
}

TEST_CASE("round-trip: parse(serialize(x)) is structurally equal, 100 random domains") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    Domain d = random_domain(rng);
    Domain d2 = parse_domain(serialize_domain(d));
    CHECK(d2 == d);

    PlanningTask t;
    t.name = "p";
    t.domain = d;
    t.initial = random_state(rng, d);
    auto atoms = all_ground_atoms(d);
    if (!atoms.empty()) t.goal.insert(atoms[rng.uniform_int(atoms.size())]);
    PlanningTask t2 = parse_problem(serialize_problem(t), d);
    CHECK(t2.initial == t.initial);
    CHECK(t2.goal == t.goal);
  }
}

TEST_CASE("round-trip on the gridcan fixtures") {
  Domain d = load_fixture_domain();
  CHECK(parse_domain(serialize_domain(d)) == d);
  PlanningTask t = load_fixture_problem(d);
  PlanningTask t2 = parse_problem(serialize_problem(t), d);
  CHECK(t2.initial == t.initial);
  CHECK(t2.goal == t.goal);
}
