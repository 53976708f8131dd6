#include "slim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace slim {
namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

IPInstance build_with(const RunConfig& config, const Dataset& data, double c0,
                      const std::vector<ConstraintSpec>& constraints) {
  CoefficientSet coeffs = CoefficientSet::Uniform(data.num_features(), config.lambda_max, config.intercept_max);
  for (const auto& [name, range] : config.bounds) {
    coeffs.set_range(data.column(name), range.first, range.second);
  }
  const ClassWeights weights = class_weights(data, config.weights, config.custom_weights);
  const double gamma = config.gamma ? *config.gamma : default_gamma(data, false);
  const double eps = config.eps ? *config.eps : default_epsilon(c0, data.num_examples(), coeffs);
  SlimOptions opt;
  opt.warn = false;
  return build_slim(data, c0, eps, gamma, coeffs, weights, constraints, opt);
}

SolveOptions solve_options(const RunConfig& config) {
  SolveOptions opt;
  opt.time_limit = config.time_limit;
  opt.node_limit = config.node_limit;
  return opt;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw InputError("config must be a JSON object");
  RunConfig c;
  c.dataset = get_or<std::string>(j, "dataset", "");
  if (!c.dataset.empty() && !base_dir.empty() && std::filesystem::path(c.dataset).is_relative()) {
    c.dataset = (base_dir / c.dataset).string();
  }
  c.label = get_or<std::string>(j, "label", c.label);
  if (j.contains("binarization") && !j.at("binarization").is_null()) c.binarization = j.at("binarization").dump();
  c.lambda_max = get_or<int>(j, "lambda_max", c.lambda_max);
  c.intercept_max = get_or<int>(j, "intercept_max", c.intercept_max);
  if (c.lambda_max < 0 || c.intercept_max < 0) throw InputError("coefficient bounds must be >= 0");
  if (j.contains("bounds")) {
    for (const auto& [name, v] : j.at("bounds").items()) {
      if (!v.is_array() || v.size() != 2) throw InputError("bounds for '" + name + "' must be [lower, upper]");
      c.bounds[name] = {v[0].get<int>(), v[1].get<int>()};
    }
  }
  if (j.contains("c0")) {
    const auto& v = j.at("c0");
    c.c0 = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
  }
  if (c.c0.empty()) throw InputError("c0 list is empty");
  for (double v : c.c0) {
    if (!(v > 0.0)) throw InputError("c0 values must be positive");
  }
  if (j.contains("eps") && !j.at("eps").is_null()) c.eps = j.at("eps").get<double>();
  if (j.contains("gamma") && !j.at("gamma").is_null()) c.gamma = j.at("gamma").get<double>();
  if (j.contains("weights")) {
    const auto& w = j.at("weights");
    if (w.is_object()) {
      c.weights = WeightMode::kCustom;
      c.custom_weights = {get_or<double>(w, "positive", 1.0), get_or<double>(w, "negative", 1.0)};
    } else {
      c.weights = parse_weight_mode(w.get<std::string>());
    }
  }
  if (j.contains("constraints")) c.constraints = j.at("constraints").dump();
  c.time_limit = get_or<double>(j, "time_limit", c.time_limit);
  c.node_limit = get_or<std::size_t>(j, "node_limit", c.node_limit);
  c.folds = get_or<std::size_t>(j, "folds", c.folds);
  if (c.folds < 2) throw InputError("folds must be at least 2");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
  c.reduce = get_or<bool>(j, "reduce", c.reduce);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["dataset"] = c.dataset;
  j["label"] = c.label;
  if (!c.binarization.empty()) j["binarization"] = json::parse(c.binarization);
  j["lambda_max"] = c.lambda_max;
  j["intercept_max"] = c.intercept_max;
  for (const auto& [name, r] : c.bounds) j["bounds"][name] = {r.first, r.second};
  j["c0"] = c.c0;
  if (c.eps) j["eps"] = *c.eps;
  if (c.gamma) j["gamma"] = *c.gamma;
  if (c.weights == WeightMode::kCustom) {
    j["weights"] = {{"positive", c.custom_weights.w_pos}, {"negative", c.custom_weights.w_neg}};
  } else {
    j["weights"] = to_string(c.weights);
  }
  j["constraints"] = json::parse(c.constraints);
  j["time_limit"] = c.time_limit;
  j["node_limit"] = c.node_limit;
  j["folds"] = c.folds;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["reduce"] = c.reduce;
  return j.dump(2);
}

std::vector<double> default_c0_path(std::size_t n, std::size_t p) {
  return {0.01, 0.075, 0.05, 0.025, 0.001, 0.9 / (static_cast<double>(n) * static_cast<double>(std::max<std::size_t>(p, 1)))};
}

Dataset load_dataset(const RunConfig& config) {
  if (config.dataset.empty()) throw InputError("no dataset given");
  Dataset data = load_csv(config.dataset, config.label);
  bool categorical = false;
  for (const auto& l : data.category_levels()) categorical = categorical || !l.empty();
  if (config.binarization.empty() && !categorical) return data;
  const BinarizationSpec spec = config.binarization.empty() ? BinarizationSpec{} : parse_binarization_spec(config.binarization);
  return binarize(data, spec).data;
}

EvalMetrics evaluate_model(const ScoringSystem& model, const Dataset& data, const ClassWeights& weights) {
  const LossCount loss = zero_one_loss(model, data);
  EvalMetrics m;
  m.n = data.num_examples();
  m.errors = loss.count;
  m.pos_errors = loss.pos_errors;
  m.neg_errors = loss.neg_errors;
  m.n_pos = data.n_pos();
  m.n_neg = data.n_neg();
  m.error = m.n ? static_cast<double>(m.errors) / static_cast<double>(m.n) : 0.0;
  const double wn = weights.w_pos * static_cast<double>(m.n_pos) + weights.w_neg * static_cast<double>(m.n_neg);
  m.weighted_error = wn > 0 ? (weights.w_pos * static_cast<double>(m.pos_errors) +
                               weights.w_neg * static_cast<double>(m.neg_errors)) / wn
                            : 0.0;
  m.tpr = m.n_pos ? 1.0 - static_cast<double>(m.pos_errors) / static_cast<double>(m.n_pos) : 0.0;
  m.fpr = m.n_neg ? static_cast<double>(m.neg_errors) / static_cast<double>(m.n_neg) : 0.0;
  return m;
}

IPInstance build_instance(const RunConfig& config, const Dataset& data, double c0) {
  return build_with(config, data, c0, parse_constraints(config.constraints, data));
}

TrainResult train(const RunConfig& config, const Dataset& data, double c0, std::ostream* trace) {
  const IPInstance inst = build_instance(config, data, c0);
  SolveOptions opt = solve_options(config);
  opt.trace = trace;

  TrainResult out;
  out.c0 = c0;
  out.eps = inst.eps;
  bool solved = false;
  if (config.reduce) {
    const auto start = polish(inst, std::vector<int>(inst.lambda.size(), 0));
    const EpsilonBounds eb = epsilon_bounds(inst, start ? std::optional<ScoringSystem>(decode(inst, start->lambda))
                                                        : std::nullopt);
    const double epsilon = eb.eps_model ? *eb.eps_model : eb.eps_max;
    if (std::isfinite(epsilon)) {
      const Reduction red = reduce(inst, epsilon);
      out.reduction = red.report;
      if (red.data.num_examples() > 0) {
        if (start) opt.start = start->lambda;
        out.solve = branch_and_bound(reduced_instance(inst, red), opt);
        solved = true;
      }
    }
  }
  if (!solved) out.solve = branch_and_bound(inst, opt);

  ModelInfo info;
  info.c0 = c0;
  info.eps = inst.eps;
  info.solver_status = to_string(out.solve.status);
  info.gap = out.solve.gap;
  for (std::size_t j = 0; j < inst.coeffs.size(); ++j) {
    info.coefficient_bounds.emplace_back(inst.coeffs.lower(j), inst.coeffs.upper(j));
  }
  out.model = out.solve.incumbent ? ScoringSystem(*out.solve.incumbent, data.feature_names(), info)
                                  : ScoringSystem::Zero(data.feature_names()).with_info(info);
  out.train = evaluate_model(out.model, data, inst.weights);
  if (out.solve.status == SolveStatus::kInfeasible) out.diagnosis = diagnose_infeasibility(config, data, c0);
  return out;
}

std::vector<std::string> diagnose_infeasibility(const RunConfig& config, const Dataset& data, double c0) {
  const auto constraints = parse_constraints(config.constraints, data);
  std::vector<std::string> families;
  for (const auto& c : constraints) {
    const std::string f = constraint_family(c);
    if (std::find(families.begin(), families.end(), f) == families.end()) families.push_back(f);
  }
  std::vector<std::string> binding;
  SolveOptions opt = solve_options(config);
  opt.time_limit = config.time_limit > 0 ? std::min(config.time_limit, 60.0) : 60.0;
  for (const auto& f : families) {
    std::vector<ConstraintSpec> rest;
    for (const auto& c : constraints) {
      if (constraint_family(c) != f) rest.push_back(c);
    }
    const SolveResult r = branch_and_bound(build_with(config, data, c0, rest), opt);
    if (r.incumbent) binding.push_back(f);
  }
  return binding;
}

std::vector<std::size_t> stratified_folds(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw InputError("need at least 2 folds");
  if (k > data.num_examples()) throw InputError("more folds than examples");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pos = data.positive_indices();
  std::vector<std::size_t> neg = data.negative_indices();
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<std::size_t> fold(data.num_examples());
  std::size_t c = 0;
  for (std::size_t i : pos) fold[i] = c++ % k;
  for (std::size_t i : neg) fold[i] = c++ % k;
  return fold;
}

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

CVResult cross_validate(const RunConfig& config, const Dataset& data, double c0) {
  const std::size_t k = config.folds;
  const auto fold = stratified_folds(data, k, config.seed);
  CVResult out;
  out.c0 = c0;
  std::vector<double> train_err, test_err, tpr, fpr, size, wall;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? te : tr).push_back(i);
    const Dataset train_data = data.subset(tr);
    if (train_data.n_pos() == 0 || train_data.n_neg() == 0) {
      throw InputError("fold " + std::to_string(f + 1) + " has a single-class training set");
    }
    const TrainResult t = train(config, train_data, c0);
    FoldResult r;
    r.train = t.train;
    r.test = evaluate_model(t.model, data.subset(te), class_weights(train_data, config.weights, config.custom_weights));
    r.model_size = t.model.model_size();
    r.gap = t.solve.gap;
    r.wall_time = t.solve.wall_time;
    r.status = t.solve.status;
    train_err.push_back(r.train.error);
    test_err.push_back(r.test.error);
    tpr.push_back(r.test.tpr);
    fpr.push_back(r.test.fpr);
    size.push_back(static_cast<double>(r.model_size));
    wall.push_back(r.wall_time);
    out.folds.push_back(r);
  }
  out.train_error = summarize(train_err);
  out.test_error = summarize(test_err);
  out.test_tpr = summarize(tpr);
  out.test_fpr = summarize(fpr);
  out.model_size = summarize(size);
  out.wall_time = summarize(wall);
  return out;
}

std::vector<PathPoint> regularization_path(const RunConfig& config, const Dataset& data) {
  if (config.c0.empty()) throw InputError("c0 list is empty");
  std::vector<PathPoint> path;
  for (double c0 : config.c0) {
    PathPoint p;
    p.c0 = c0;
    try {
      p.final_model = train(config, data, c0);
      p.cv = cross_validate(config, data, c0);
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    path.push_back(std::move(p));
  }
  return path;
}

std::optional<std::size_t> best_path_point(const std::vector<PathPoint>& path) {
  std::optional<std::size_t> best;
  auto key = [&](std::size_t i) {
    return std::make_tuple(path[i].cv->test_error.mean, path[i].final_model->model.model_size(), -path[i].c0);
  };
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!path[i].final_model || !path[i].cv || !path[i].final_model->solve.incumbent) continue;
    if (!best || key(i) < key(*best)) best = i;
  }
  return best;
}

void write_metrics_csv(const TrainResult* final_model, const CVResult* cv, std::ostream& out) {
  out << "scope,c0,train_error,test_error,train_tpr,train_fpr,test_tpr,test_fpr,model_size,gap,wall_time,status\n";
  if (cv) {
    for (std::size_t f = 0; f < cv->folds.size(); ++f) {
      const auto& r = cv->folds[f];
      out << "fold" << f + 1 << ',' << fmt(cv->c0) << ',' << fmt(r.train.error) << ',' << fmt(r.test.error) << ','
          << fmt(r.train.tpr) << ',' << fmt(r.train.fpr) << ',' << fmt(r.test.tpr) << ',' << fmt(r.test.fpr) << ','
          << r.model_size << ',' << fmt(r.gap) << ',' << fmt(r.wall_time) << ',' << to_string(r.status) << '\n';
    }
    const std::pair<const char*, double Summary::*> stats[] = {
        {"mean", &Summary::mean}, {"sd", &Summary::sd}, {"min", &Summary::min}, {"max", &Summary::max}};
    for (const auto& [name, field] : stats) {
      out << name << ',' << fmt(cv->c0) << ',' << fmt(cv->train_error.*field) << ',' << fmt(cv->test_error.*field)
          << ",,," << fmt(cv->test_tpr.*field) << ',' << fmt(cv->test_fpr.*field) << ','
          << fmt(cv->model_size.*field) << ",," << fmt(cv->wall_time.*field) << ",\n";
    }
  }
  if (final_model) {
    const auto& t = *final_model;
    out << "final," << fmt(t.c0) << ',' << fmt(t.train.error) << ",," << fmt(t.train.tpr) << ','
        << fmt(t.train.fpr) << ",,," << t.model.model_size() << ',' << fmt(t.solve.gap) << ','
        << fmt(t.solve.wall_time) << ',' << to_string(t.solve.status) << '\n';
  }
}

void write_path_csv(const std::vector<PathPoint>& path, std::ostream& out) {
  out << "c0,model_size,train_error,cv_test_error_mean,cv_test_error_sd,cv_model_size_mean,status,error\n";
  for (const auto& p : path) {
    out << fmt(p.c0) << ',';
    if (p.final_model) {
      out << p.final_model->model.model_size() << ',' << fmt(p.final_model->train.error) << ',';
    } else {
      out << ",,";
    }
    if (p.cv) {
      out << fmt(p.cv->test_error.mean) << ',' << fmt(p.cv->test_error.sd) << ',' << fmt(p.cv->model_size.mean) << ',';
    } else {
      out << ",,,";
    }
    out << (p.final_model ? to_string(p.final_model->solve.status) : "") << ',';
    std::string e = p.error;
    std::replace(e.begin(), e.end(), ',', ';');
    std::replace(e.begin(), e.end(), '\n', ' ');
    out << e << '\n';
  }
}

void write_train_outputs(const std::filesystem::path& dir, const TrainResult& result, const CVResult* cv) {
  std::filesystem::create_directories(dir);
  save_model(result.model, dir / "model.json");
  std::ofstream(dir / "model.txt") << render_table(result.model);
  std::ofstream metrics(dir / "metrics.csv");
  write_metrics_csv(&result, cv, metrics);
  if (result.reduction) std::ofstream(dir / "reduction.json") << report_to_json(*result.reduction) << '\n';
}

}  // namespace slim
