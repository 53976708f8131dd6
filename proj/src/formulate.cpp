#include "slim/formulate.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace slim {

namespace {

constexpr double kLossTol = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_feature(std::size_t j, std::size_t p, const char* what) {
  if (j < 1 || j > p) {
    throw InputError(std::string(what) + ": feature index " + std::to_string(j) +
                     " out of range 1.." + std::to_string(p));
  }
}

bool is_loss_family(const std::string& family) {
  return family == "loss" || family == "max_fpr" || family == "min_tpr";
}

std::size_t add_loss_block(IPInstance& inst, const Dataset& data) {
  const std::size_t n = data.num_examples();
  inst.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = data.y(i) > 0 ? inst.weights.w_pos : inst.weights.w_neg;
    inst.psi[i] = inst.add_var({"psi_" + std::to_string(i + 1), VarKind::kBinary, VarRole::kLoss, 0.0,
                                1.0, i},
                               w / inst.normalization);
  }
  return n;
}

void add_loss_rows(IPInstance& inst, const Dataset& data) {
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    Row r;
    r.name = "loss_" + std::to_string(i + 1);
    r.family = "loss";
    r.terms.emplace_back(inst.psi[i], inst.big_m[i]);
    for (std::size_t j = 0; j < data.num_columns(); ++j) {
      const double v = data.x(i, j);
      if (v != 0.0) r.terms.emplace_back(inst.lambda[j], data.y(i) * v);
    }
    r.lower = inst.gamma;
    inst.add_row(std::move(r));
  }
}

void add_coefficient_vars(IPInstance& inst, const Dataset& data, bool binary_features = false) {
  inst.lambda.resize(data.num_columns());
  for (std::size_t j = 0; j < data.num_columns(); ++j) {
    const bool binary = binary_features && j > 0;
    inst.lambda[j] = inst.add_var({"lambda_" + std::to_string(j),
                                   binary ? VarKind::kBinary : VarKind::kInteger, VarRole::kCoefficient,
                                   static_cast<double>(inst.coeffs.lower(j)),
                                   static_cast<double>(inst.coeffs.upper(j)), j});
  }
}

// alpha_j and beta_j with their link rows for column j.
void add_norm_links(IPInstance& inst, std::size_t j, double alpha_cost, double beta_cost) {
  const double lo = inst.coeffs.lower(j);
  const double hi = inst.coeffs.upper(j);
  const double cap = inst.coeffs.max_abs(j);
  inst.alpha[j] = inst.add_var({"alpha_" + std::to_string(j), VarKind::kBinary, VarRole::kL0, 0.0, 1.0, j},
                               alpha_cost);
  inst.beta[j] = inst.add_var({"beta_" + std::to_string(j), VarKind::kContinuous, VarRole::kL1, 0.0, cap, j},
                              beta_cost);
  const std::size_t lam = inst.lambda[j];
  inst.add_row({{{lam, 1.0}, {inst.alpha[j], -hi}}, -kInf, 0.0, "l0_ub_" + std::to_string(j), "l0"});
  inst.add_row({{{lam, 1.0}, {inst.alpha[j], -lo}}, 0.0, kInf, "l0_lb_" + std::to_string(j), "l0"});
  inst.add_row({{{lam, 1.0}, {inst.beta[j], -1.0}}, -kInf, 0.0, "l1_ub_" + std::to_string(j), "l1"});
  inst.add_row({{{lam, 1.0}, {inst.beta[j], 1.0}}, 0.0, kInf, "l1_lb_" + std::to_string(j), "l1"});
}

void apply_constraint_rows(IPInstance& inst, const ConstraintSpec& spec) {
  const Dataset& data = *inst.data;
  const std::size_t p = data.num_features();
  std::visit(
      Overloaded{
          [&](const MaxFPR& c) { add_max_fpr(inst, c.gamma_fpr); },
          [&](const MinTPR& c) {
            if (c.tpr <= 0.0 || c.tpr > 1.0) throw InputError("min_tpr must lie in (0, 1]");
            if (data.n_pos() == 0) throw InputError("min_tpr needs positive examples");
            Row r;
            r.name = "min_tpr";
            r.family = "min_tpr";
            for (std::size_t i : data.positive_indices()) r.terms.emplace_back(inst.psi[i], 1.0);
            r.upper = std::floor((1.0 - c.tpr) * static_cast<double>(data.n_pos()) + 1e-9);
            inst.add_row(std::move(r));
          },
          [&](const MaxModelSize& c) {
            if (c.theta > p) throw InputError("max_size exceeds the number of features");
            Row r;
            r.name = "max_size";
            r.family = "max_size";
            for (std::size_t j = 1; j <= p; ++j) r.terms.emplace_back(inst.alpha[j], 1.0);
            r.upper = static_cast<double>(c.theta);
            inst.add_row(std::move(r));
          },
          [&](const IfThen& c) {
            check_feature(c.consequent, p, "if_then");
            Row r;
            r.name = "if_then_" + std::to_string(c.consequent);
            r.family = "if_then";
            for (std::size_t a : c.antecedents) {
              check_feature(a, p, "if_then");
              r.terms.emplace_back(inst.alpha[a], 1.0);
            }
            r.terms.emplace_back(inst.alpha[c.consequent], -static_cast<double>(c.antecedents.size()));
            r.upper = 0.0;
            inst.add_row(std::move(r));
          },
          [&](const Hierarchy& c) {
            check_feature(c.leaf, p, "hierarchy");
            for (std::size_t node : c.nodes) {
              check_feature(node, p, "hierarchy");
              inst.add_row({{{inst.alpha[c.leaf], 1.0}, {inst.alpha[node], -1.0}},
                            -kInf,
                            0.0,
                            "hierarchy_" + std::to_string(c.leaf) + "_" + std::to_string(node),
                            "hierarchy"});
            }
          },
          [&](const auto&) {},
      },
      spec);
}

}  // namespace

std::string constraint_family(const ConstraintSpec& spec) {
  return std::visit(Overloaded{
                        [](const MaxFPR&) { return std::string("max_fpr"); },
                        [](const MinTPR&) { return std::string("min_tpr"); },
                        [](const MaxModelSize&) { return std::string("max_size"); },
                        [](const Sign&) { return std::string("sign"); },
                        [](const IfThen&) { return std::string("if_then"); },
                        [](const Hierarchy&) { return std::string("hierarchy"); },
                        [](const PerFeaturePenalty&) { return std::string("penalty"); },
                        [](const PinZero&) { return std::string("pin_zero"); },
                    },
                    spec);
}

std::vector<ConstraintSpec> parse_constraints(const std::string& json_text, const Dataset& data) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed constraint list: ") + e.what());
  }
  if (!j.is_array()) throw InputError("constraints must be a JSON array");

  auto feature = [&](const nlohmann::json& v) -> std::size_t {
    if (v.is_number_integer()) {
      const auto k = v.get<std::int64_t>();
      if (k < 1 || static_cast<std::size_t>(k) > data.num_features()) {
        throw InputError("feature index " + std::to_string(k) + " out of range");
      }
      return static_cast<std::size_t>(k);
    }
    if (!v.is_string()) throw InputError("feature reference must be a name or an index");
    const std::size_t col = data.column(v.get<std::string>());
    if (col == 0) throw InputError("the intercept cannot be constrained");
    return col;
  };
  auto features = [&](const nlohmann::json& v) {
    std::vector<std::size_t> out;
    if (v.is_array()) {
      for (const auto& e : v) out.push_back(feature(e));
    } else {
      out.push_back(feature(v));
    }
    return out;
  };

  std::vector<ConstraintSpec> out;
  try {
    for (const auto& c : j) {
      if (c.contains("max_fpr")) {
        const double v = c["max_fpr"].get<double>();
        if (!(v > 0.0 && v < 1.0)) throw InputError("max_fpr must lie in (0, 1)");
        out.push_back(MaxFPR{v});
      } else if (c.contains("min_tpr")) {
        const double v = c["min_tpr"].get<double>();
        if (!(v > 0.0 && v <= 1.0)) throw InputError("min_tpr must lie in (0, 1]");
        out.push_back(MinTPR{v});
      } else if (c.contains("max_size")) {
        const auto theta = c["max_size"].get<std::int64_t>();
        if (theta < 0) throw InputError("max_size must be >= 0");
        out.push_back(MaxModelSize{static_cast<std::size_t>(theta)});
      } else if (c.contains("sign")) {
        int sign = 1;
        const auto& d = c.at("direction");
        if (d.is_string()) {
          const auto s = d.get<std::string>();
          if (s == "+" || s == "positive") {
            sign = 1;
          } else if (s == "-" || s == "negative") {
            sign = -1;
          } else {
            throw InputError("sign direction must be '+' or '-'");
          }
        } else {
          sign = d.get<int>() >= 0 ? 1 : -1;
        }
        out.push_back(Sign{feature(c["sign"]), sign});
      } else if (c.contains("if_then")) {
        out.push_back(IfThen{features(c["if_then"]), feature(c.at("then"))});
      } else if (c.contains("hierarchy")) {
        out.push_back(Hierarchy{feature(c["hierarchy"]), features(c.at("requires"))});
      } else if (c.contains("penalty")) {
        out.push_back(PerFeaturePenalty{feature(c["penalty"]), c.at("c0").get<double>()});
      } else if (c.contains("pin_zero")) {
        for (std::size_t f : features(c["pin_zero"])) out.push_back(PinZero{f});
      } else {
        throw InputError("unknown constraint: " + c.dump());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed constraint: ") + e.what());
  }
  return out;
}

std::size_t IPInstance::add_var(Variable v, double cost) {
  vars.push_back(std::move(v));
  objective.push_back(cost);
  return vars.size() - 1;
}

void IPInstance::add_row(Row r) { rows.push_back(std::move(r)); }

std::vector<double> big_m_loss(const Dataset& data, const CoefficientSet& coeffs, double gamma) {
  if (!(gamma > 0.0)) throw InputError("gamma must be positive");
  std::vector<double> m(data.num_examples(), gamma);
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    for (std::size_t j = 0; j < data.num_columns(); ++j) {
      const double a = -data.y(i) * data.x(i, j);
      m[i] += std::max(a * coeffs.lower(j), a * coeffs.upper(j));
    }
  }
  return m;
}

double default_gamma(const Dataset& data, bool warn) {
  if (warn && !data.binary()) {
    std::cerr << "warning: gamma = 0.1 assumes binary features; the data has non-binary columns\n";
  }
  return 0.1;
}

double default_epsilon(double c0, std::size_t n, const CoefficientSet& coeffs) {
  if (!(c0 > 0.0)) throw InputError("C0 must be positive");
  if (n == 0) throw InputError("epsilon needs at least one example");
  const double l1 = coeffs.max_l1();
  if (l1 <= 0.0) return 0.0;
  return 0.5 * std::min(1.0 / static_cast<double>(n), c0) / l1;
}

double missing_data_penalty(double c0, std::size_t m_missing, std::size_t n) {
  if (n == 0 || m_missing > n) throw InputError("missing count must lie in [0, N]");
  return c0 + static_cast<double>(m_missing) / static_cast<double>(n);
}

IPInstance build_slim(const Dataset& data, double c0, double eps, double gamma,
                      const CoefficientSet& coeffs, const ClassWeights& weights,
                      const std::vector<ConstraintSpec>& constraints, const SlimOptions& options) {
  const std::size_t n = data.num_examples();
  const std::size_t p = data.num_features();
  if (n == 0) throw InputError("empty dataset");
  if (!(c0 > 0.0)) throw InputError("C0 must be positive");
  if (eps < 0.0) throw InputError("epsilon must be >= 0");
  if (coeffs.size() != p + 1) {
    throw InputError("coefficient set has " + std::to_string(coeffs.size()) + " entries, expected " +
                     std::to_string(p + 1));
  }

  IPInstance inst;
  inst.family = Family::kSlim;
  inst.data = std::make_shared<const Dataset>(data);
  inst.coeffs = coeffs;
  inst.weights = weights;
  inst.gamma = gamma;
  inst.eps = eps;
  inst.normalization = options.normalization > 0.0 ? options.normalization : static_cast<double>(n);
  inst.objective_offset = options.objective_offset;
  inst.constraints = constraints;

  inst.c0.assign(p + 1, c0);
  inst.c0[0] = 0.0;
  const auto& missing = data.missing_counts();
  for (std::size_t j = 1; j <= p && j < missing.size(); ++j) {
    if (missing[j] > 0) inst.c0[j] = missing_data_penalty(c0, std::min(missing[j], n), n);
  }

  for (const auto& spec : constraints) {
    if (const auto* s = std::get_if<Sign>(&spec)) {
      check_feature(s->feature, p, "sign");
      const bool had_sign = s->sign > 0 ? inst.coeffs.upper(s->feature) > 0 : inst.coeffs.lower(s->feature) < 0;
      if (!had_sign) {
        throw InputError("sign constraint on '" + data.feature_names()[s->feature] +
                         "' is incompatible with its coefficient set");
      }
      inst.coeffs.restrict_sign(s->feature, s->sign);
    } else if (const auto* z = std::get_if<PinZero>(&spec)) {
      check_feature(z->feature, p, "pin_zero");
      inst.coeffs.pin_zero(z->feature);
    } else if (const auto* w = std::get_if<PerFeaturePenalty>(&spec)) {
      check_feature(w->feature, p, "penalty");
      if (!(w->c0 > 0.0)) throw InputError("per-feature penalty must be positive");
      inst.c0[w->feature] = w->c0;
    }
  }
  if (!options.column_c0.empty()) {
    if (options.column_c0.size() != p + 1) throw InputError("column penalties do not match the dataset");
    inst.c0 = options.column_c0;
    inst.c0[0] = 0.0;
  }

  if (options.warn && eps > 0.0) {
    const double l1 = inst.coeffs.max_l1();
    if (l1 > 0.0 && eps >= std::min(1.0 / static_cast<double>(n), c0) / l1) {
      std::cerr << "warning: epsilon " << eps << " is not below min(1/N, C0) / max l1\n";
    }
  }

  inst.big_m = big_m_loss(data, inst.coeffs, gamma);
  add_coefficient_vars(inst, data);
  add_loss_block(inst, data);
  inst.phi.assign(p + 1, kNone);
  inst.alpha.assign(p + 1, kNone);
  inst.beta.assign(p + 1, kNone);
  for (std::size_t j = 1; j <= p; ++j) {
    const double cap = inst.coeffs.max_abs(j);
    inst.phi[j] = inst.add_var(
        {"phi_" + std::to_string(j), VarKind::kContinuous, VarRole::kPenalty, 0.0, inst.c0[j] + eps * cap, j});
  }

  add_loss_rows(inst, data);
  for (std::size_t j = 1; j <= p; ++j) {
    // Phi_j is filled in after alpha/beta exist; reserve the row slot now.
    inst.add_row({{}, 0.0, 0.0, "penalty_" + std::to_string(j), "penalty"});
  }
  const std::size_t penalty_row0 = inst.rows.size() - p;
  for (std::size_t j = 1; j <= p; ++j) add_norm_links(inst, j, inst.c0[j], eps);
  for (std::size_t j = 1; j <= p; ++j) {
    inst.rows[penalty_row0 + j - 1].terms = {
        {inst.phi[j], 1.0}, {inst.alpha[j], -inst.c0[j]}, {inst.beta[j], -eps}};
  }

  for (const auto& spec : constraints) apply_constraint_rows(inst, spec);
  return inst;
}

void add_max_fpr(IPInstance& instance, double gamma_fpr) {
  if (!(gamma_fpr > 0.0 && gamma_fpr < 1.0)) throw InputError("max_fpr must lie in (0, 1)");
  const Dataset& data = *instance.data;
  if (data.n_neg() == 0) throw InputError("max_fpr needs negative examples");
  Row r;
  r.name = "max_fpr";
  r.family = "max_fpr";
  for (std::size_t i : data.negative_indices()) r.terms.emplace_back(instance.psi[i], 1.0);
  r.upper = std::floor(gamma_fpr * static_cast<double>(data.n_neg()) + 1e-9);
  instance.add_row(std::move(r));
}

IPInstance build_pilm(const Dataset& data, const std::vector<InterpretabilitySet>& sets,
                      int intercept_max, double gamma, const ClassWeights& weights) {
  const std::size_t n = data.num_examples();
  const std::size_t p = data.num_features();
  if (n == 0) throw InputError("empty dataset");
  if (sets.empty()) throw InputError("PILM needs at least one coefficient set");
  std::set<int> seen;
  for (std::size_t r = 0; r < sets.size(); ++r) {
    if (r > 0 && !(sets[r].cost > sets[r - 1].cost)) {
      throw InputError("PILM set costs must be strictly increasing");
    }
    for (int v : sets[r].values) {
      if (!seen.insert(v).second) throw InputError("PILM sets overlap at value " + std::to_string(v));
    }
  }
  if (!seen.count(0)) throw InputError("PILM sets must contain 0");

  IPInstance inst;
  inst.family = Family::kPilm;
  inst.data = std::make_shared<const Dataset>(data);
  inst.weights = weights;
  inst.gamma = gamma;
  inst.normalization = static_cast<double>(n);
  inst.coeffs = CoefficientSet::Uniform(p, 0, intercept_max);
  const std::vector<int> all(seen.begin(), seen.end());
  for (std::size_t j = 1; j <= p; ++j) inst.coeffs.set_values(j, all);

  inst.big_m = big_m_loss(data, inst.coeffs, gamma);
  add_coefficient_vars(inst, data);
  add_loss_block(inst, data);
  add_loss_rows(inst, data);

  inst.phi.assign(p + 1, kNone);
  inst.alpha.assign(p + 1, kNone);
  inst.beta.assign(p + 1, kNone);
  inst.selectors.assign(p + 1, {});
  for (std::size_t j = 1; j <= p; ++j) {
    inst.phi[j] = inst.add_var(
        {"phi_" + std::to_string(j), VarKind::kContinuous, VarRole::kPenalty, 0.0, sets.back().cost, j}, 1.0);
    Row one{{}, 1.0, 1.0, "select_" + std::to_string(j), "select"};
    Row link{{{inst.lambda[j], 1.0}}, 0.0, 0.0, "value_" + std::to_string(j), "select"};
    Row pen{{{inst.phi[j], 1.0}}, 0.0, 0.0, "penalty_" + std::to_string(j), "penalty"};
    for (std::size_t r = 0; r < sets.size(); ++r) {
      for (int v : sets[r].values) {
        const std::size_t u = inst.add_var({"u_" + std::to_string(j) + "_" + std::to_string(r) + "_" +
                                                (v < 0 ? "m" + std::to_string(-v) : std::to_string(v)),
                                            VarKind::kBinary, VarRole::kSelector, 0.0, 1.0, j});
        inst.selectors[j].push_back({u, v, sets[r].cost});
        one.terms.emplace_back(u, 1.0);
        if (v != 0) link.terms.emplace_back(u, -static_cast<double>(v));
        if (sets[r].cost != 0.0) pen.terms.emplace_back(u, -sets[r].cost);
      }
    }
    inst.add_row(std::move(one));
    inst.add_row(std::move(link));
    inst.add_row(std::move(pen));
  }
  return inst;
}

IPInstance build_mofn(const Dataset& data, double c0, double gamma, const ClassWeights& weights) {
  const std::size_t n = data.num_examples();
  const std::size_t p = data.num_features();
  if (n == 0) throw InputError("empty dataset");
  if (!(c0 > 0.0)) throw InputError("C0 must be positive");
  if (!data.binary()) throw InputError("M-of-N rule tables need binary features");

  IPInstance inst;
  inst.family = Family::kMofN;
  inst.data = std::make_shared<const Dataset>(data);
  inst.weights = weights;
  inst.gamma = gamma;
  inst.normalization = static_cast<double>(n);
  inst.coeffs = CoefficientSet::Uniform(p, 1, 0);
  for (std::size_t j = 1; j <= p; ++j) inst.coeffs.set_range(j, 0, 1);
  inst.coeffs.set_range(0, -static_cast<int>(p), 0);
  inst.c0.assign(p + 1, c0);
  inst.c0[0] = 0.0;

  inst.big_m = big_m_loss(data, inst.coeffs, gamma);
  add_coefficient_vars(inst, data, true);
  for (std::size_t j = 1; j <= p; ++j) inst.objective[inst.lambda[j]] = c0;
  add_loss_block(inst, data);
  add_loss_rows(inst, data);
  return inst;
}

IPInstance build_tilm(const Dataset& data, const std::vector<std::vector<std::size_t>>& groups,
                      double c_f, double c_t, double eps, int r_max, int lambda_max,
                      int intercept_max, double gamma, const ClassWeights& weights) {
  const std::size_t n = data.num_examples();
  const std::size_t p = data.num_features();
  if (n == 0) throw InputError("empty dataset");
  if (r_max < 1) throw InputError("r_max must be >= 1");
  if (c_f < 0.0 || c_t < 0.0 || eps < 0.0) throw InputError("TILM penalties must be >= 0");

  std::vector<int> owner(p + 1, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw InputError("TILM rule group " + std::to_string(g) + " is empty");
    for (std::size_t j : groups[g]) {
      check_feature(j, p, "tilm group");
      if (owner[j] >= 0) throw InputError("column " + std::to_string(j) + " is in two rule groups");
      owner[j] = static_cast<int>(g);
    }
  }

  IPInstance inst;
  inst.family = Family::kTilm;
  inst.data = std::make_shared<const Dataset>(data);
  inst.weights = weights;
  inst.gamma = gamma;
  inst.eps = eps;
  inst.r_max = r_max;
  inst.normalization = static_cast<double>(n);
  inst.coeffs = CoefficientSet::Uniform(p, lambda_max, intercept_max);
  inst.groups = groups;
  for (std::size_t j = 1; j <= p; ++j) {
    if (owner[j] < 0) inst.groups.push_back({j});
  }

  inst.big_m = big_m_loss(data, inst.coeffs, gamma);
  add_coefficient_vars(inst, data);
  add_loss_block(inst, data);
  add_loss_rows(inst, data);
  inst.phi.assign(p + 1, kNone);
  inst.alpha.assign(p + 1, kNone);
  inst.beta.assign(p + 1, kNone);
  for (std::size_t j = 1; j <= p; ++j) add_norm_links(inst, j, 0.0, eps);

  for (std::size_t g = 0; g < inst.groups.size(); ++g) {
    const auto& cols = inst.groups[g];
    const std::string tag = std::to_string(g + 1);
    const double t = static_cast<double>(cols.size());
    inst.nu.push_back(inst.add_var({"nu_" + tag, VarKind::kBinary, VarRole::kFeatureUse, 0.0, 1.0, g}, c_f));
    inst.tau.push_back(inst.add_var(
        {"tau_" + tag, VarKind::kInteger, VarRole::kExtraRules, 0.0, static_cast<double>(r_max + 1), g}, c_t));
    inst.delta.push_back(
        inst.add_var({"delta_" + tag, VarKind::kBinary, VarRole::kSignChoice, 0.0, 1.0, g}));
    Row use{{{inst.nu[g], -t}}, -kInf, 0.0, "use_" + tag, "feature_use"};
    Row extra{{{inst.tau[g], 1.0}}, -1.0, kInf, "extra_" + tag, "extra_rules"};
    Row cap{{}, -kInf, static_cast<double>(r_max), "max_rules_" + tag, "max_rules"};
    for (std::size_t j : cols) {
      use.terms.emplace_back(inst.alpha[j], 1.0);
      extra.terms.emplace_back(inst.alpha[j], -1.0);
      cap.terms.emplace_back(inst.alpha[j], 1.0);
      const double big = inst.coeffs.max_abs(j);
      inst.add_row({{{inst.lambda[j], 1.0}, {inst.delta[g], -big}}, -kInf, 0.0,
                    "sign_ub_" + std::to_string(j), "sign"});
      inst.add_row({{{inst.lambda[j], 1.0}, {inst.delta[g], -big}}, -big, kInf,
                    "sign_lb_" + std::to_string(j), "sign"});
    }
    inst.add_row(std::move(use));
    inst.add_row(std::move(extra));
    inst.add_row(std::move(cap));
  }
  return inst;
}

namespace {

// Fills every non-loss variable from lambda. False when lambda leaves L or a
// definitional value cannot exist (mixed signs in a TILM group).
bool fill_aux(const IPInstance& inst, const std::vector<int>& lambda, std::vector<double>& x) {
  if (lambda.size() != inst.lambda.size()) return false;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    if (!inst.coeffs.contains(j, lambda[j])) return false;
    x[inst.lambda[j]] = lambda[j];
  }
  for (std::size_t j = 1; j < lambda.size(); ++j) {
    if (inst.alpha.size() > j && inst.alpha[j] != kNone) x[inst.alpha[j]] = lambda[j] != 0 ? 1.0 : 0.0;
    if (inst.beta.size() > j && inst.beta[j] != kNone) x[inst.beta[j]] = std::abs(lambda[j]);
  }
  switch (inst.family) {
    case Family::kSlim:
      for (std::size_t j = 1; j < lambda.size(); ++j) {
        x[inst.phi[j]] = inst.c0[j] * (lambda[j] != 0 ? 1.0 : 0.0) + inst.eps * std::abs(lambda[j]);
      }
      break;
    case Family::kPilm:
      for (std::size_t j = 1; j < lambda.size(); ++j) {
        bool found = false;
        for (const auto& s : inst.selectors[j]) {
          const bool on = s.value == lambda[j];
          x[s.var] = on ? 1.0 : 0.0;
          if (on) {
            x[inst.phi[j]] = s.cost;
            found = true;
          }
        }
        if (!found) return false;
      }
      break;
    case Family::kMofN:
      break;
    case Family::kTilm:
      for (std::size_t g = 0; g < inst.groups.size(); ++g) {
        int used = 0;
        bool neg = false;
        bool pos = false;
        for (std::size_t j : inst.groups[g]) {
          used += lambda[j] != 0;
          neg |= lambda[j] < 0;
          pos |= lambda[j] > 0;
        }
        if (neg && pos) return false;
        x[inst.nu[g]] = used > 0 ? 1.0 : 0.0;
        x[inst.tau[g]] = std::max(0, used - 1);
        x[inst.delta[g]] = neg ? 0.0 : 1.0;
      }
      break;
  }
  return true;
}

bool row_ok(const Row& r, const std::vector<double>& x, double tol) {
  double s = 0.0;
  for (const auto& [k, a] : r.terms) s += a * x[k];
  const double scale = 1.0 + std::abs(s);
  return s >= r.lower - tol * scale && s <= r.upper + tol * scale;
}

}  // namespace

std::optional<std::vector<double>> complete(const IPInstance& instance, const std::vector<int>& lambda) {
  std::vector<double> x(instance.num_vars(), 0.0);
  if (!fill_aux(instance, lambda, x)) return std::nullopt;
  const Dataset& data = *instance.data;
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < data.num_columns(); ++j) s += lambda[j] * data.x(i, j);
    x[instance.psi[i]] = instance.gamma - data.y(i) * s > kLossTol ? 1.0 : 0.0;
  }
  if (!feasible(instance, x)) return std::nullopt;
  return x;
}

std::optional<double> penalty_value(const IPInstance& instance, const std::vector<int>& lambda) {
  std::vector<double> x(instance.num_vars(), 0.0);
  if (!fill_aux(instance, lambda, x)) return std::nullopt;
  for (const auto& r : instance.rows) {
    if (!is_loss_family(r.family) && !row_ok(r, x, 1e-9)) return std::nullopt;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (instance.vars[k].role != VarRole::kLoss) total += instance.objective[k] * x[k];
  }
  return total;
}

double evaluate(const IPInstance& instance, const std::vector<double>& x) {
  double total = instance.objective_offset;
  for (std::size_t k = 0; k < x.size(); ++k) total += instance.objective[k] * x[k];
  return total;
}

bool feasible(const IPInstance& instance, const std::vector<double>& x, double tol) {
  if (x.size() != instance.num_vars()) return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto& v = instance.vars[k];
    if (x[k] < v.lower - tol || x[k] > v.upper + tol) return false;
    if (v.kind != VarKind::kContinuous && std::abs(x[k] - std::round(x[k])) > 1e-6) return false;
  }
  for (const auto& r : instance.rows) {
    if (!row_ok(r, x, tol)) return false;
  }
  return true;
}

std::vector<int> extract_lambda(const IPInstance& instance, const std::vector<double>& x) {
  std::vector<int> out(instance.lambda.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<int>(std::lround(x[instance.lambda[j]]));
  return out;
}

ScoringSystem decode(const IPInstance& instance, const std::vector<int>& lambda) {
  ModelInfo info;
  info.c0 = instance.c0.size() > 1 ? instance.c0[1] : 0.0;
  info.eps = instance.eps;
  for (std::size_t j = 0; j < instance.coeffs.size(); ++j) {
    info.coefficient_bounds.emplace_back(instance.coeffs.lower(j), instance.coeffs.upper(j));
  }
  return ScoringSystem(lambda, instance.data->feature_names(), std::move(info));
}

MofNTable decode_mofn(const IPInstance& instance, const std::vector<int>& lambda) {
  MofNTable t;
  t.m = 1 - lambda[0];
  const auto& names = instance.data->feature_names();
  for (std::size_t j = 1; j < lambda.size(); ++j) {
    if (lambda[j] != 0) t.rules.push_back(names[j]);
  }
  return t;
}

std::string render_mofn(const MofNTable& table, const std::string& outcome) {
  std::string out = "PREDICT " + outcome + " IF AT LEAST " + std::to_string(table.m) + " OF THE FOLLOWING " +
                    std::to_string(table.rules.size()) + " RULES ARE TRUE\n";
  for (std::size_t k = 0; k < table.rules.size(); ++k) {
    out += std::to_string(k + 1) + ". " + table.rules[k] + "\n";
  }
  return out;
}

void write_lp(const IPInstance& instance, std::ostream& out) {
  auto term = [&](double a, std::size_t k, bool first) {
    std::string s;
    if (a < 0) {
      s = first ? "-" : " - ";
    } else if (!first) {
      s = " + ";
    }
    if (std::abs(a) != 1.0) {
      std::ostringstream num;
      num.precision(17);
      num << std::abs(a);
      s += num.str() + " ";
    }
    return s + instance.vars[k].name;
  };
  auto expr = [&](const std::vector<std::pair<std::size_t, double>>& terms) {
    std::string s;
    bool first = true;
    for (const auto& [k, a] : terms) {
      if (a == 0.0) continue;
      s += term(a, k, first);
      first = false;
    }
    return first ? std::string("0 ") + instance.vars[0].name : s;
  };

  out.precision(17);
  std::vector<std::pair<std::size_t, double>> obj;
  for (std::size_t k = 0; k < instance.objective.size(); ++k) {
    if (instance.objective[k] != 0.0) obj.emplace_back(k, instance.objective[k]);
  }
  out << "\\ objective offset " << instance.objective_offset << "\nMinimize\n obj: " << expr(obj)
      << "\nSubject To\n";
  for (const auto& r : instance.rows) {
    const std::string e = expr(r.terms);
    if (r.lower == r.upper) {
      out << ' ' << r.name << ": " << e << " = " << r.lower << '\n';
      continue;
    }
    if (r.lower > -kInf) out << ' ' << r.name << (r.upper < kInf ? "_lo" : "") << ": " << e << " >= " << r.lower << '\n';
    if (r.upper < kInf) out << ' ' << r.name << (r.lower > -kInf ? "_hi" : "") << ": " << e << " <= " << r.upper << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : instance.vars) {
    if (v.kind == VarKind::kBinary) continue;
    out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
  }
  out << "General\n";
  for (const auto& v : instance.vars) {
    if (v.kind == VarKind::kInteger) out << ' ' << v.name << '\n';
  }
  out << "Binary\n";
  for (const auto& v : instance.vars) {
    if (v.kind == VarKind::kBinary) out << ' ' << v.name << '\n';
  }
  out << "End\n";
}

}  // namespace slim
