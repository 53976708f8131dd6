#include "slim/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace slim {

// ---- CoefficientSet ---------------------------------------------------------------

CoefficientSet CoefficientSet::Uniform(std::size_t num_features, int lambda_max, int intercept_max) {
  if (lambda_max < 0 || intercept_max < 0) throw InputError("coefficient bounds must be >= 0");
  CoefficientSet s;
  s.lower_.assign(num_features + 1, -lambda_max);
  s.upper_.assign(num_features + 1, lambda_max);
  s.lower_[0] = -intercept_max;
  s.upper_[0] = intercept_max;
  s.explicit_.assign(num_features + 1, {});
  return s;
}

int CoefficientSet::max_abs(std::size_t j) const {
  if (!explicit_[j].empty()) {
    int m = 0;
    for (int v : explicit_[j]) m = std::max(m, std::abs(v));
    return m;
  }
  return std::max(std::abs(lower_[j]), std::abs(upper_[j]));
}

bool CoefficientSet::contains(std::size_t j, int v) const {
  if (v < lower_[j] || v > upper_[j]) return false;
  if (explicit_[j].empty()) return true;
  return std::binary_search(explicit_[j].begin(), explicit_[j].end(), v);
}

std::vector<int> CoefficientSet::values(std::size_t j) const {
  if (!explicit_[j].empty()) {
    std::vector<int> out;
    for (int v : explicit_[j]) {
      if (v >= lower_[j] && v <= upper_[j]) out.push_back(v);
    }
    return out;
  }
  std::vector<int> out(static_cast<std::size_t>(upper_[j] - lower_[j] + 1));
  std::iota(out.begin(), out.end(), lower_[j]);
  return out;
}

std::size_t CoefficientSet::cardinality(std::size_t j) const { return values(j).size(); }

double CoefficientSet::max_l1() const {
  double total = 0.0;
  for (std::size_t j = 1; j < size(); ++j) total += max_abs(j);
  return total;
}

int CoefficientSet::snap(std::size_t j, double v) const {
  int best = 0;
  double best_dist = std::abs(v);
  for (int c : values(j)) {
    const double d = std::abs(v - c);
    if (d < best_dist - 1e-12 || (std::abs(d - best_dist) <= 1e-12 && std::abs(c) < std::abs(best))) {
      best = c;
      best_dist = d;
    }
  }
  return best;
}

void CoefficientSet::set_range(std::size_t j, int lower, int upper) {
  if (lower > 0 || upper < 0) {
    throw InputError("coefficient range for index " + std::to_string(j) + " must contain 0");
  }
  lower_[j] = lower;
  upper_[j] = upper;
}

void CoefficientSet::set_values(std::size_t j, std::vector<int> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (!std::binary_search(values.begin(), values.end(), 0)) {
    throw InputError("coefficient values for index " + std::to_string(j) + " must contain 0");
  }
  lower_[j] = values.front();
  upper_[j] = values.back();
  explicit_[j] = std::move(values);
}

void CoefficientSet::restrict_sign(std::size_t j, int sign) {
  if (sign > 0) lower_[j] = std::max(lower_[j], 0);
  if (sign < 0) upper_[j] = std::min(upper_[j], 0);
}

// ---- ScoringSystem -------------------------------------------------------------------

ScoringSystem::ScoringSystem(std::vector<int> lambda, std::vector<std::string> feature_names,
                             ModelInfo info)
    : lambda_(std::move(lambda)), names_(std::move(feature_names)), info_(std::move(info)) {
  if (lambda_.empty()) throw InputError("scoring system needs at least an intercept");
  if (names_.size() != lambda_.size()) {
    throw InputError("scoring system has " + std::to_string(lambda_.size()) +
                     " coefficients but " + std::to_string(names_.size()) + " names");
  }
}

ScoringSystem ScoringSystem::Zero(const std::vector<std::string>& feature_names) {
  return ScoringSystem(std::vector<int>(feature_names.size(), 0), feature_names);
}

ScoringSystem ScoringSystem::with_info(ModelInfo info) const {
  ScoringSystem s = *this;
  s.info_ = std::move(info);
  return s;
}

std::size_t ScoringSystem::model_size() const { return norms(*this).l0; }

double score(const ScoringSystem& model, std::span<const double> x) {
  const auto& lambda = model.lambda();
  if (x.size() != lambda.size()) {
    throw InputError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                     std::to_string(lambda.size()));
  }
  bool integral = true;
  for (double v : x) {
    if (v != std::floor(v) || std::abs(v) > 1e15) {
      integral = false;
      break;
    }
  }
  if (integral) {
    std::int64_t total = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      total += static_cast<std::int64_t>(lambda[j]) * static_cast<std::int64_t>(x[j]);
    }
    return static_cast<double>(total);
  }
  double total = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) total += lambda[j] * x[j];
  return total;
}

int predict(const ScoringSystem& model, std::span<const double> x) {
  return score(model, x) > 0.0 ? 1 : -1;
}

LossCount zero_one_loss(const ScoringSystem& model, const Dataset& data) {
  LossCount out;
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    if (data.y(i) * score(model, data.row(i)) <= 0.0) {
      ++out.count;
      ++(data.y(i) > 0 ? out.pos_errors : out.neg_errors);
    }
  }
  out.rate = static_cast<double>(out.count) / static_cast<double>(data.num_examples());
  return out;
}

double weighted_loss(const ScoringSystem& model, const Dataset& data, const ClassWeights& weights) {
  const LossCount loss = zero_one_loss(model, data);
  const double n = static_cast<double>(data.num_examples());
  return weights.w_pos * static_cast<double>(loss.pos_errors) / n +
         weights.w_neg * static_cast<double>(loss.neg_errors) / n;
}

Norms norms(const ScoringSystem& model) {
  Norms out;
  const auto& lambda = model.lambda();
  for (std::size_t j = 1; j < lambda.size(); ++j) {
    if (lambda[j] != 0) ++out.l0;
    out.l1 += std::abs(lambda[j]);
  }
  return out;
}

double objective(const ScoringSystem& model, const Dataset& data, double c0, double eps) {
  const Norms nm = norms(model);
  return zero_one_loss(model, data).rate + c0 * static_cast<double>(nm.l0) +
         eps * static_cast<double>(nm.l1);
}

double objective(const ScoringSystem& model, const Dataset& data,
                 std::span<const double> c0_per_feature, double eps,
                 const ClassWeights& weights) {
  double total = weighted_loss(model, data, weights);
  const auto& lambda = model.lambda();
  for (std::size_t j = 1; j < lambda.size(); ++j) {
    if (lambda[j] != 0) total += c0_per_feature[j];
  }
  return total + eps * static_cast<double>(norms(model).l1);
}

int coefficient_gcd(const ScoringSystem& model) {
  int g = 0;
  for (int v : model.lambda()) g = std::gcd(g, std::abs(v));
  return g;
}

bool is_coprime(const ScoringSystem& model) {
  const int g = coefficient_gcd(model);
  return g == 0 || g == 1;
}

// ---- rendering ---------------------------------------------------------------------

namespace {

struct TableRow {
  std::string index, feature, points, tally;
};

std::string points_text(int v) {
  return std::to_string(v) + (std::abs(v) == 1 ? " point" : " points");
}

std::string pad_right(const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); }
std::string pad_left(const std::string& s, std::size_t w) { return std::string(w - s.size(), ' ') + s; }

}  // namespace

std::string render_table(const ScoringSystem& model, const RenderOptions& options) {
  const auto& lambda = model.lambda();
  const auto& names = model.feature_names();
  std::vector<std::size_t> order;
  for (std::size_t j = 1; j < lambda.size(); ++j) {
    if (lambda[j] != 0) order.push_back(j);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (std::abs(lambda[a]) != std::abs(lambda[b])) return std::abs(lambda[a]) > std::abs(lambda[b]);
    return names[a] < names[b];
  });

  std::ostringstream out;
  const std::string headline =
      "PREDICT " + options.outcome + " IF SCORE > " + std::to_string(-model.intercept());

  if (order.empty()) {
    if (options.markdown) {
      out << "**" << headline << "**\n\nSCORE = 0 FOR EVERY INPUT\n";
    } else {
      out << headline << "\nSCORE = 0 FOR EVERY INPUT\n";
    }
    return out.str();
  }

  std::vector<TableRow> rows;
  for (std::size_t k = 0; k < order.size(); ++k) {
    rows.push_back({std::to_string(k + 1) + ".", names[order[k]], points_text(lambda[order[k]]),
                    k == 0 ? "  ....." : "+ ....."});
  }
  const std::string footer_text =
      order.size() == 1 ? "ADD POINTS FROM ROW 1" : "ADD POINTS FROM ROWS 1-" + std::to_string(order.size());
  const TableRow footer{"", footer_text, "SCORE", "= ....."};

  if (options.markdown) {
    out << "**" << headline << "**\n\n";
    out << "| # | Feature | Points | |\n|---|---|---:|---|\n";
    for (const auto& r : rows) {
      out << "| " << r.index << " | " << r.feature << " | " << r.points << " | " << r.tally << " |\n";
    }
    out << "| | **" << footer.feature << "** | **" << footer.points << "** | " << footer.tally
        << " |\n";
    return out.str();
  }

  std::size_t w[4] = {0, 0, 0, 0};
  auto widen = [&](const TableRow& r) {
    w[0] = std::max(w[0], r.index.size());
    w[1] = std::max(w[1], r.feature.size());
    w[2] = std::max(w[2], r.points.size());
    w[3] = std::max(w[3], r.tally.size());
  };
  for (const auto& r : rows) widen(r);
  widen(footer);

  std::string border = "+";
  for (std::size_t c : w) border += std::string(c + 2, '-') + "+";
  auto line = [&](const TableRow& r) {
    return "| " + pad_right(r.index, w[0]) + " | " + pad_right(r.feature, w[1]) + " | " +
           pad_left(r.points, w[2]) + " | " + pad_right(r.tally, w[3]) + " |";
  };

  out << headline << '\n' << border << '\n';
  for (const auto& r : rows) out << line(r) << '\n';
  out << border << '\n' << line(footer) << '\n' << border << '\n';
  return out.str();
}

// ---- persistence ---------------------------------------------------------------------

std::string model_to_json(const ScoringSystem& model) {
  nlohmann::ordered_json j;
  j["feature_names"] = model.feature_names();
  j["intercept"] = model.intercept();
  j["coefficients"] = std::vector<int>(model.lambda().begin() + 1, model.lambda().end());
  nlohmann::json bounds = nlohmann::json::array();
  for (const auto& [lo, hi] : model.info().coefficient_bounds) bounds.push_back({lo, hi});
  j["coefficient_set_bounds"] = bounds;
  j["c0"] = model.info().c0;
  j["eps"] = model.info().eps;
  j["solver_status"] = model.info().solver_status;
  j["gap"] = model.info().gap;
  return j.dump(2) + "\n";
}

ScoringSystem model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    std::vector<int> lambda{j.at("intercept").get<int>()};
    for (int v : j.at("coefficients").get<std::vector<int>>()) lambda.push_back(v);
    ModelInfo info;
    if (j.contains("coefficient_set_bounds")) {
      for (const auto& b : j.at("coefficient_set_bounds")) {
        info.coefficient_bounds.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
      }
    }
    info.c0 = j.value("c0", 0.0);
    info.eps = j.value("eps", 0.0);
    info.solver_status = j.value("solver_status", std::string());
    info.gap = j.value("gap", 0.0);
    return ScoringSystem(std::move(lambda), j.at("feature_names").get<std::vector<std::string>>(),
                         std::move(info));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const ScoringSystem& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << model_to_json(model);
}

ScoringSystem load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace slim
