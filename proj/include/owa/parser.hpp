#pragma once

#include <string>

#include "owa/symbolic.hpp"

namespace owa {

// PDDL-lite s-expression grammar (';' starts a line comment):
//
//   domain  := (define (domain NAME)
//                (:types NAME*)
//                (:constants DECL*)          ; NAME+ - TYPE groups
//                (:predicates (NAME DECL*)*) ; DECL = ?var+ - TYPE
//                ACTION*)
//   ACTION  := (:action NAME
//                :parameters (DECL*)
//                :precondition CONJ
//                :effect ECONJ)
//   CONJ    := (and ATOM*) | ATOM | ()
//   ECONJ   := (and EFF*) | EFF | ()
//   EFF     := ATOM | (not ATOM)
//   ATOM    := (PRED TERM*)                  ; TERM = ?var | entity
//   problem := (define (problem NAME) (:domain NAME)
//                (:objects DECL*)?           ; optional, must match domain
//                (:init ATOM*)
//                (:goal CONJ))
//
// Types are a flat list (no hierarchy). Preconditions are positive atoms;
// 'not' is allowed in effects only.

Domain parse_domain(const std::string& text);
PlanningTask parse_problem(const std::string& text, const Domain& domain);

// Canonical form: sections sorted by name, atom sets in canonical atom
// order. parse(serialize(x)) is structurally equal to x.
std::string serialize_domain(const Domain& domain);
std::string serialize_problem(const PlanningTask& task);

Domain load_domain_file(const std::string& path);
PlanningTask load_problem_file(const std::string& path, const Domain& domain);

}  // namespace owa
