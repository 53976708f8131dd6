#include "slim/reduce.hpp"

#include <cmath>

#include <json.hpp>

#include "slim/milp.hpp"

namespace slim {
namespace {

constexpr double kTieTol = 1e-9;

std::vector<std::pair<std::size_t, double>> flip_terms(const IPInstance& inst, std::size_t i, int sign) {
  std::vector<std::pair<std::size_t, double>> terms;
  const Dataset& data = *inst.data;
  for (std::size_t j = 0; j < data.num_columns(); ++j) {
    const double v = data.x(i, j);
    if (v != 0.0) terms.emplace_back(inst.lambda[j], sign * v);
  }
  return terms;
}

double flip_rhs(const IPInstance& inst, std::size_t i, int sign) {
  return sign == inst.data->y(i) ? 0.0 : -inst.gamma;
}

void check_reducible(const IPInstance& inst) {
  if (inst.family != Family::kSlim) throw InputError("data reduction needs a SLIM instance");
  for (const auto& r : inst.rows) {
    if (r.family == "max_fpr" || r.family == "min_tpr") {
      throw InputError("data reduction does not support " + r.family + " constraints");
    }
  }
}

}  // namespace

LPProblem flip_constraint(const IPInstance& instance, std::size_t i, int baseline_sign) {
  if (baseline_sign != 1 && baseline_sign != -1) throw InputError("baseline sign must be +1 or -1");
  if (i >= instance.data->num_examples()) throw InputError("example index out of range");
  LPProblem lp = lp_relaxation(instance);
  lp.rows.push_back({flip_terms(instance, i, baseline_sign), -kInf, flip_rhs(instance, i, baseline_sign)});
  return lp;
}

Reduction reduce(const IPInstance& inst, double epsilon) {
  if (!(epsilon >= 0.0)) throw InputError("epsilon must be >= 0");
  check_reducible(inst);
  const Dataset& data = *inst.data;
  const std::size_t n = data.num_examples();

  DualSimplex root(lp_relaxation(inst));
  const LPStatus status = root.Solve();
  if (status != LPStatus::kOptimal) {
    throw std::runtime_error(std::string("surrogate LP is ") + to_string(status));
  }
  const std::vector<double> x = root.Primal();

  ReductionReport rep;
  rep.epsilon = epsilon;
  rep.surrogate_objective = root.Objective() + inst.objective_offset;
  const double level = rep.surrogate_objective + epsilon;
  const double tol = 1e-9 * std::max(1.0, std::abs(rep.surrogate_objective));
  rep.verdicts.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    ExampleVerdict& v = rep.verdicts[i];
    double s = 0.0;
    for (std::size_t j = 0; j < data.num_columns(); ++j) s += data.x(i, j) * x[inst.lambda[j]];
    v.tie = std::abs(s) <= kTieTol;
    v.sign = s > kTieTol ? 1 : -1;
    if (v.tie || std::isinf(epsilon)) continue;

    DualSimplex variant = root;
    variant.AddRow(flip_terms(inst, i, v.sign), -kInf, flip_rhs(inst, i, v.sign));
    v.status = variant.Solve();
    if (v.status != LPStatus::kOptimal) continue;
    v.objective = variant.Objective() + inst.objective_offset;
    v.removed = v.objective > level + tol;
  }

  double wrong = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (rep.verdicts[i].removed) {
      rep.removed.push_back(i);
      if (rep.verdicts[i].sign != data.y(i)) wrong += data.y(i) > 0 ? inst.weights.w_pos : inst.weights.w_neg;
    } else {
      rep.kept.push_back(i);
    }
  }
  rep.removed_fraction = static_cast<double>(rep.removed.size()) / static_cast<double>(n);
  rep.offset = wrong / inst.normalization;
  return {data.subset(rep.kept), std::move(rep)};
}

IPInstance reduced_instance(const IPInstance& original, const Reduction& reduction) {
  check_reducible(original);
  if (reduction.data.num_examples() == 0) throw InputError("every example was removed");
  SlimOptions opt;
  opt.normalization = original.normalization;
  opt.objective_offset = original.objective_offset + reduction.report.offset;
  opt.warn = false;
  opt.column_c0 = original.c0;
  double c0 = 1.0;
  for (std::size_t j = 1; j < original.c0.size(); ++j) {
    if (original.c0[j] > 0.0) {
      c0 = original.c0[j];
      break;
    }
  }
  return build_slim(reduction.data, c0, original.eps, original.gamma, original.coeffs, original.weights,
                    original.constraints, opt);
}

EpsilonBounds epsilon_bounds(const IPInstance& inst, const std::optional<ScoringSystem>& model) {
  DualSimplex lp(lp_relaxation(inst));
  const LPStatus status = lp.Solve();
  if (status != LPStatus::kOptimal) {
    throw std::runtime_error(std::string("surrogate LP is ") + to_string(status));
  }
  EpsilonBounds out;
  out.surrogate = lp.Objective() + inst.objective_offset;
  auto gap = [&](const std::vector<int>& lambda) -> std::optional<double> {
    const auto x = complete(inst, lambda);
    if (!x) return std::nullopt;
    return std::max(0.0, evaluate(inst, *x) - out.surrogate);
  };
  if (const auto e = gap(std::vector<int>(inst.lambda.size(), 0))) out.eps_max = *e;
  if (model) {
    if (model->lambda().size() != inst.lambda.size()) throw InputError("model does not match the instance");
    out.eps_model = gap(model->lambda());
    if (!out.eps_model) throw InputError("model is not feasible for the instance");
  }
  return out;
}

std::string report_to_json(const ReductionReport& r) {
  nlohmann::ordered_json j;
  j["epsilon"] = std::isinf(r.epsilon) ? nlohmann::ordered_json("inf") : nlohmann::ordered_json(r.epsilon);
  j["surrogate_objective"] = r.surrogate_objective;
  j["n"] = r.verdicts.size();
  j["m"] = r.m();
  j["removed_fraction"] = r.removed_fraction;
  j["offset"] = r.offset;
  auto& ex = j["examples"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.verdicts.size(); ++i) {
    const auto& v = r.verdicts[i];
    nlohmann::ordered_json e;
    e["index"] = i;
    e["verdict"] = v.removed ? "removed" : "kept";
    e["sign"] = v.sign;
    if (v.tie) e["tie"] = true;
    e["status"] = to_string(v.status);
    if (std::isfinite(v.objective)) e["objective"] = v.objective;
    ex.push_back(std::move(e));
  }
  return j.dump(2);
}

}  // namespace slim
