#ifndef SLIM_REDUCE_HPP_
#define SLIM_REDUCE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slim/formulate.hpp"
#include "slim/lp.hpp"
#include "slim/scoring.hpp"

namespace slim {

struct ExampleVerdict {
  bool removed = false;
  int sign = -1;          // baseline prediction of the surrogate optimum
  bool tie = false;       // baseline score within 1e-9 of zero
  LPStatus status = LPStatus::kOptimal;
  double objective = kInf;  // variant objective (offset included)
};

struct ReductionReport {
  double epsilon = 0.0;
  double surrogate_objective = 0.0;  // root LP optimum, offset included
  std::vector<ExampleVerdict> verdicts;
  std::vector<std::size_t> kept;     // original indices, in order
  std::vector<std::size_t> removed;
  double removed_fraction = 0.0;
  // Weighted loss of removed examples whose fixed sign is wrong, divided by
  // the original normalization.
  double offset = 0.0;

  std::size_t m() const { return kept.size(); }
};

std::string report_to_json(const ReductionReport& report);

struct Reduction {
  Dataset data;  // kept examples
  ReductionReport report;
};

// Appends the constraint forcing example i to leave the baseline's side:
// sign * lambda^T x_i <= 0 when the baseline classifies i correctly (so the
// variant can reach an error), and <= -gamma when it misclassifies i (so the
// variant can reach a margin-gamma correct classification).
LPProblem flip_constraint(const IPInstance& instance, std::size_t i, int baseline_sign);

// Removes every example whose predicted sign is constant on the surrogate
// level set {Z~ <= Z~* + epsilon}. Only the loss, penalty, l0, l1, size and
// feature-logic rows are supported: rows coupling the loss variables
// (max_fpr, min_tpr) make the fixed examples non-separable and are refused.
Reduction reduce(const IPInstance& instance, double epsilon);

// The SLIM instance on the kept examples: same coefficient set, per-column
// penalties, gamma and weights, the original normalization and the offset of
// the removed examples, so objectives are comparable with the original.
IPInstance reduced_instance(const IPInstance& original, const Reduction& reduction);

struct EpsilonBounds {
  double surrogate = 0.0;         // Z~(f~*)
  double eps_max = kInf;          // Z(0) - Z~(f~*); inf when 0 is infeasible
  std::optional<double> eps_model;  // Z(model) - Z~(f~*)
};

EpsilonBounds epsilon_bounds(const IPInstance& instance, const std::optional<ScoringSystem>& model = {});

}  // namespace slim

#endif  // SLIM_REDUCE_HPP_
