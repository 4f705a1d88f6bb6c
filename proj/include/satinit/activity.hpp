#pragma once

#include <vector>

#include "satinit/cnf.hpp"
#include "satinit/program.hpp"
#include "satinit/solver.hpp"

namespace satinit {

/// Clause visiting order used by both interpreters: binary clauses in stored
/// order, then every other clause in stored order.
std::vector<std::size_t> clause_visit_order(const Cnf& cnf);

/// Single pass over the clauses. For every clause C and every literal X in C,
/// the IN fragment runs once per other literal L of C against X's private
/// registers. PRE runs before the pass and POST after it, once per variable.
/// `counters` (optional) also tallies violations of the terminal bounds
/// 0 <= ic < xc and 0 <= il < cs - 1.
/// Cost: O(|tree| * sum over clauses of |C| * (|C| - 1)).
ActivityVector compute_activities(const InitProgram& prog, const Cnf& cnf, const VarStats& stats,
                                  EvalCounters* counters = nullptr);

/// Per-variable double loop: for each X, run PRE, then IN for every clause
/// containing X (in visit order) and every other literal, then POST. Slow;
/// kept as the oracle for compute_activities.
ActivityVector reference_compute_activities(const InitProgram& prog, const Cnf& cnf, const VarStats& stats);

/// Divides by the largest absolute value; an all-zero vector is returned unchanged.
ActivityVector normalize(const ActivityVector& acts);

}  // namespace satinit
