#ifndef SLIM_MILP_HPP_
#define SLIM_MILP_HPP_

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "slim/formulate.hpp"
#include "slim/lp.hpp"

namespace slim {

// Continuous relaxation: same bounds and rows, integrality dropped.
LPProblem lp_relaxation(const IPInstance& instance);

enum class SolveStatus { kOptimal, kFeasibleBudgetExhausted, kInfeasible, kNoIncumbent };

const char* to_string(SolveStatus status);

struct SolveOptions {
  double time_limit = 600.0;  // seconds; <= 0 means unlimited
  std::size_t node_limit = 0;  // 0 means unlimited
  double gap_tolerance = 1e-9;
  bool polish = true;
  std::optional<std::vector<int>> start;  // extra incumbent candidate
  std::ostream* trace = nullptr;          // tab-separated, one line per node
};

struct SolveResult {
  SolveStatus status = SolveStatus::kNoIncumbent;
  std::optional<std::vector<int>> incumbent;
  std::vector<double> assignment;
  double incumbent_objective = kInf;
  double lower_bound = -kInf;
  double root_bound = -kInf;
  double gap = kInf;
  std::size_t nodes_explored = 0;
  double wall_time = 0.0;
  // (global lower bound, incumbent objective) after each node.
  std::vector<std::pair<double, double>> progress;
};

SolveResult branch_and_bound(const IPInstance& instance, const SolveOptions& options = {});

struct Candidate {
  std::vector<int> lambda;
  double objective = kInf;
};

// Coordinate descent from `start`: each move changes one coefficient and
// re-picks the best intercept. Returns the best verified feasible point, or
// nullopt when none was found.
std::optional<Candidate> polish(const IPInstance& instance, std::vector<int> start);

struct OracleResult {
  double objective = kInf;
  std::vector<std::vector<int>> optima;  // every lambda within tie_tolerance of the best
  std::size_t evaluated = 0;
};

inline constexpr double kMaxOracleSpace = 1e7;

// Enumerates L directly: loss 1[y lambda^T x <= 0], weighted by W/N, plus
// per-feature l0 penalties (missing-data adjusted like build_slim) and eps l1,
// with every ConstraintSpec checked on lambda. Throws InputError when |L|
// exceeds kMaxOracleSpace.
OracleResult exhaustive_oracle(const Dataset& data, const CoefficientSet& coeffs, double c0, double eps,
                               const ClassWeights& weights, const std::vector<ConstraintSpec>& constraints,
                               double tie_tolerance = 1e-12);

// Enumerates the coefficient box of an instance and scores each point with
// complete()/evaluate().
OracleResult enumerate_instance(const IPInstance& instance, double tie_tolerance = 1e-12);

}  // namespace slim

#endif  // SLIM_MILP_HPP_
