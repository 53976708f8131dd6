#ifndef SLIM_SCORING_HPP_
#define SLIM_SCORING_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slim/data.hpp"

namespace slim {

// Finite integer value sets L_0..L_P. Each L_j is an inclusive range
// [lower, upper] optionally restricted to an explicit value list. 0 is always
// a member so the zero model stays feasible.
class CoefficientSet {
 public:
  CoefficientSet() = default;

  // {-lambda_max..lambda_max} for every feature, {-intercept_max..intercept_max}
  // for the intercept.
  static CoefficientSet Uniform(std::size_t num_features, int lambda_max, int intercept_max);

  std::size_t size() const { return lower_.size(); }  // P + 1
  int lower(std::size_t j) const { return lower_[j]; }
  int upper(std::size_t j) const { return upper_[j]; }
  // Lambda_j: largest absolute value in L_j.
  int max_abs(std::size_t j) const;
  bool contains(std::size_t j, int v) const;
  std::vector<int> values(std::size_t j) const;
  std::size_t cardinality(std::size_t j) const;
  // Sum of Lambda_j over j >= 1: the largest l1-norm of a member of L.
  double max_l1() const;
  // Closest member of L_j to v (ties toward zero).
  int snap(std::size_t j, double v) const;

  void set_range(std::size_t j, int lower, int upper);
  void set_values(std::size_t j, std::vector<int> values);
  // Restrict L_j to nonnegative (sign > 0) or nonpositive (sign < 0) values.
  void restrict_sign(std::size_t j, int sign);
  void pin_zero(std::size_t j) { set_range(j, 0, 0); }

 private:
  std::vector<int> lower_;
  std::vector<int> upper_;
  std::vector<std::vector<int>> explicit_;  // empty = full range
};

struct ModelInfo {
  double c0 = 0.0;
  double eps = 0.0;
  std::string solver_status;
  double gap = 0.0;
  std::vector<std::pair<int, int>> coefficient_bounds;
};

// Integer linear scoring system: predicts +1 iff lambda^T x > 0, where x[0] = 1.
class ScoringSystem {
 public:
  ScoringSystem() = default;
  ScoringSystem(std::vector<int> lambda, std::vector<std::string> feature_names,
                ModelInfo info = {});
  static ScoringSystem Zero(const std::vector<std::string>& feature_names);

  // lambda[0] is the intercept.
  const std::vector<int>& lambda() const { return lambda_; }
  int intercept() const { return lambda_[0]; }
  int coefficient(std::size_t j) const { return lambda_[j]; }
  std::size_t num_features() const { return lambda_.empty() ? 0 : lambda_.size() - 1; }
  const std::vector<std::string>& feature_names() const { return names_; }
  const ModelInfo& info() const { return info_; }
  ScoringSystem with_info(ModelInfo info) const;

  std::size_t model_size() const;

  bool operator==(const ScoringSystem& other) const { return lambda_ == other.lambda_; }

 private:
  std::vector<int> lambda_;
  std::vector<std::string> names_;
  ModelInfo info_;
};

// lambda^T x. Integer-valued inputs are accumulated in 64-bit integers so the
// result is exact; otherwise double arithmetic is used and a score within
// rounding of 0 may land on either side.
double score(const ScoringSystem& model, std::span<const double> x);
int predict(const ScoringSystem& model, std::span<const double> x);

struct LossCount {
  std::size_t count = 0;      // examples with y * score <= 0
  std::size_t pos_errors = 0;
  std::size_t neg_errors = 0;
  double rate = 0.0;
};

LossCount zero_one_loss(const ScoringSystem& model, const Dataset& data);
// (W+/N) * errors on I+ + (W-/N) * errors on I-.
double weighted_loss(const ScoringSystem& model, const Dataset& data, const ClassWeights& weights);

struct Norms {
  std::size_t l0 = 0;
  std::int64_t l1 = 0;
};
// Over the non-intercept coefficients only.
Norms norms(const ScoringSystem& model);

// loss_rate + c0 * l0 + eps * l1.
double objective(const ScoringSystem& model, const Dataset& data, double c0, double eps);
// Weighted loss with per-feature l0 penalties (c0_per_feature has P+1 entries;
// entry 0 is ignored).
double objective(const ScoringSystem& model, const Dataset& data,
                 std::span<const double> c0_per_feature, double eps,
                 const ClassWeights& weights);

// gcd(|lambda_0|, ..., |lambda_P|); 0 for the all-zero model.
int coefficient_gcd(const ScoringSystem& model);
// True when the gcd over all coefficients (intercept included) is 1. The
// all-zero model is reported as coprime; coefficient_gcd() returns 0 for it.
bool is_coprime(const ScoringSystem& model);

struct RenderOptions {
  std::string outcome = "Y = +1";
  bool markdown = false;
};
// Points table: one row per nonzero coefficient, ordered by descending
// |lambda_j| then feature name, and a headline with threshold -lambda_0.
std::string render_table(const ScoringSystem& model, const RenderOptions& options = {});

std::string model_to_json(const ScoringSystem& model);
ScoringSystem model_from_json(const std::string& text);
void save_model(const ScoringSystem& model, const std::filesystem::path& path);
ScoringSystem load_model(const std::filesystem::path& path);

}  // namespace slim

#endif  // SLIM_SCORING_HPP_
