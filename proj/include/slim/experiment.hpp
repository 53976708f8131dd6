#ifndef SLIM_EXPERIMENT_HPP_
#define SLIM_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "slim/data.hpp"
#include "slim/formulate.hpp"
#include "slim/milp.hpp"
#include "slim/reduce.hpp"
#include "slim/scoring.hpp"

namespace slim {

struct RunConfig {
  std::string dataset;
  std::string label = "label";
  std::string binarization;  // JSON object text; empty for none
  int lambda_max = 10;
  int intercept_max = 100;
  std::map<std::string, std::pair<int, int>> bounds;  // per-feature overrides
  std::vector<double> c0 = {0.01};
  std::optional<double> eps;
  std::optional<double> gamma;
  WeightMode weights = WeightMode::kUniform;
  ClassWeights custom_weights;
  std::string constraints = "[]";  // JSON array text
  double time_limit = 600.0;
  std::size_t node_limit = 0;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::string output_dir;
  bool reduce = false;
};

// Keys: dataset, label, binarization, lambda_max, intercept_max, bounds,
// c0 (number or list), eps, gamma, weights ("uniform" | "balanced" |
// "max_sensitivity" | {"positive": w, "negative": w}), constraints,
// time_limit, node_limit, folds, seed, output_dir, reduce. Relative dataset
// paths resolve against `base_dir`.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

// {0.01, 0.075, 0.05, 0.025, 0.001, 0.9 / (N P)}.
std::vector<double> default_c0_path(std::size_t n, std::size_t p);

// Loads the dataset and applies the binarization spec (category-coded columns
// are binarized even without one).
Dataset load_dataset(const RunConfig& config);

struct EvalMetrics {
  std::size_t n = 0;
  std::size_t errors = 0;
  std::size_t pos_errors = 0;  // false negatives
  std::size_t neg_errors = 0;  // false positives
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  double error = 0.0;           // errors / n
  double weighted_error = 0.0;  // (W+ pos_errors + W- neg_errors) / (W+ N+ + W- N-)
  double tpr = 0.0;             // 1 - pos_errors / N+ (0 without positives)
  double fpr = 0.0;             // neg_errors / N- (0 without negatives)
};

EvalMetrics evaluate_model(const ScoringSystem& model, const Dataset& data, const ClassWeights& weights = {});

struct TrainResult {
  ScoringSystem model;
  SolveResult solve;
  EvalMetrics train;
  double c0 = 0.0;
  double eps = 0.0;
  std::optional<ReductionReport> reduction;
  std::vector<std::string> diagnosis;  // binding families when infeasible
};

// Builds the SLIM instance for `data`, optionally reduces it, solves it and
// decodes the incumbent. Without an incumbent `model` is the zero model and
// solve.status says why.
TrainResult train(const RunConfig& config, const Dataset& data, double c0, std::ostream* trace = nullptr);

IPInstance build_instance(const RunConfig& config, const Dataset& data, double c0);

// Families whose removal makes an infeasible instance feasible.
std::vector<std::string> diagnose_infeasibility(const RunConfig& config, const Dataset& data, double c0);

// Stratified fold ids in [0, k): each class is shuffled with `seed` and
// dealt round-robin, continuing the deal across classes.
std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed);

struct Summary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double min = 0.0;
  double max = 0.0;
};
Summary summarize(const std::vector<double>& values);

struct FoldResult {
  EvalMetrics train;
  EvalMetrics test;
  std::size_t model_size = 0;
  double gap = 0.0;
  double wall_time = 0.0;
  SolveStatus status = SolveStatus::kNoIncumbent;
};

struct CVResult {
  double c0 = 0.0;
  std::vector<FoldResult> folds;
  Summary train_error, test_error, test_tpr, test_fpr, model_size, wall_time;
};

CVResult cross_validate(const RunConfig& config, const Dataset& data, double c0);

struct PathPoint {
  double c0 = 0.0;
  std::optional<TrainResult> final_model;
  std::optional<CVResult> cv;
  std::string error;  // set when this c0 failed
};

std::vector<PathPoint> regularization_path(const RunConfig& config, const Dataset& data);

// Lowest mean CV test error, then smaller final model, then larger C0.
// Index into `path`, or nullopt when no point succeeded.
std::optional<std::size_t> best_path_point(const std::vector<PathPoint>& path);

void write_metrics_csv(const TrainResult* final_model, const CVResult* cv, std::ostream& out);
void write_path_csv(const std::vector<PathPoint>& path, std::ostream& out);

// model.json, model.txt and metrics.csv (plus reduction.json when reduced).
void write_train_outputs(const std::filesystem::path& dir, const TrainResult& result, const CVResult* cv = nullptr);

}  // namespace slim

#endif  // SLIM_EXPERIMENT_HPP_
