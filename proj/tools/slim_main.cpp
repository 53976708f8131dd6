// Command line front end: train, cv, path, reduce, bounds, render.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "slim/experiment.hpp"
#include "slim/theory.hpp"

namespace {

using namespace slim;

constexpr int kExitInfeasible = 2;
constexpr int kExitNoIncumbent = 3;
constexpr int kExitInput = 4;

struct CommonFlags {
  std::string config;
  std::string data;
  std::string label;
  std::vector<double> c0;
  std::optional<std::size_t> max_size;
  std::optional<double> max_fpr;
  std::optional<double> time_limit;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> folds;
  std::string weights;
  std::string out;
  bool reduce = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration");
  cmd->add_option("--data", f.data, "CSV dataset (overrides the config)");
  cmd->add_option("--label", f.label, "label column");
  cmd->add_option("--c0", f.c0, "l0 penalty (one or more values)");
  cmd->add_option("--max-size", f.max_size, "cap on nonzero coefficients");
  cmd->add_option("--max-fpr", f.max_fpr, "cap on the training false positive rate");
  cmd->add_option("--time-limit", f.time_limit, "seconds per IP (<= 0: unlimited)");
  cmd->add_option("--seed", f.seed, "fold assignment seed");
  cmd->add_option("--folds", f.folds, "cross-validation folds");
  cmd->add_option("--weights", f.weights, "uniform | balanced | max_sensitivity");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--reduce", f.reduce, "reduce the data before solving");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.data.empty()) c.dataset = f.data;
  if (!f.label.empty()) c.label = f.label;
  if (!f.c0.empty()) c.c0 = f.c0;
  for (double v : c.c0) {
    if (!(v > 0.0)) throw InputError("c0 values must be positive");
  }
  auto extra = nlohmann::json::parse(c.constraints);
  if (f.max_size) extra.push_back({{"max_size", *f.max_size}});
  if (f.max_fpr) extra.push_back({{"max_fpr", *f.max_fpr}});
  c.constraints = extra.dump();
  if (f.time_limit) c.time_limit = *f.time_limit;
  if (f.seed) c.seed = *f.seed;
  if (f.folds) c.folds = *f.folds;
  if (!f.weights.empty()) c.weights = parse_weight_mode(f.weights);
  if (!f.out.empty()) c.output_dir = f.out;
  c.reduce = c.reduce || f.reduce;
  return c;
}

void print_summary(const char* what, const Summary& s) {
  std::cout << std::left << std::setw(16) << what << std::fixed << std::setprecision(4) << s.mean << " +- " << s.sd
            << "  [" << s.min << ", " << s.max << "]\n";
  std::cout.unsetf(std::ios::floatfield);
}

int exit_code(const SolveResult& r) {
  if (r.status == SolveStatus::kInfeasible) return kExitInfeasible;
  if (!r.incumbent) return kExitNoIncumbent;
  return 0;
}

int run_train(const CommonFlags& flags) {
  const RunConfig config = resolve(flags);
  const Dataset data = load_dataset(config);
  std::optional<std::ofstream> trace;
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    trace.emplace(std::filesystem::path(config.output_dir) / "trace.tsv");
  }
  const TrainResult r = train(config, data, config.c0.front(), trace ? &*trace : nullptr);
  std::cout << "status: " << to_string(r.solve.status) << "  objective: " << r.solve.incumbent_objective
            << "  gap: " << r.solve.gap << "  nodes: " << r.solve.nodes_explored << "  time: " << r.solve.wall_time
            << "s\n";
  if (r.reduction) {
    std::cout << "reduction: kept " << r.reduction->m() << " of " << r.reduction->verdicts.size() << " examples\n";
  }
  if (!r.diagnosis.empty()) {
    std::cout << "infeasible; dropping any one of these constraint families restores feasibility:";
    for (const auto& f : r.diagnosis) std::cout << ' ' << f;
    std::cout << '\n';
  }
  if (r.solve.incumbent) {
    std::cout << render_table(r.model);
    std::cout << "training error: " << r.train.error << "  TPR: " << r.train.tpr << "  FPR: " << r.train.fpr
              << "  model size: " << r.model.model_size() << '\n';
    if (!config.output_dir.empty()) write_train_outputs(config.output_dir, r);
  }
  return exit_code(r.solve);
}

int run_cv(const CommonFlags& flags) {
  const RunConfig config = resolve(flags);
  const Dataset data = load_dataset(config);
  const double c0 = config.c0.front();
  const CVResult cv = cross_validate(config, data, c0);
  print_summary("train error", cv.train_error);
  print_summary("test error", cv.test_error);
  print_summary("test TPR", cv.test_tpr);
  print_summary("test FPR", cv.test_fpr);
  print_summary("model size", cv.model_size);
  if (!config.output_dir.empty()) {
    std::filesystem::create_directories(config.output_dir);
    std::ofstream out(std::filesystem::path(config.output_dir) / "metrics.csv");
    write_metrics_csv(nullptr, &cv, out);
  }
  return 0;
}

int run_path(const CommonFlags& flags) {
  RunConfig config = resolve(flags);
  const Dataset data = load_dataset(config);
  if (flags.c0.empty() && (flags.config.empty() || config.c0 == RunConfig{}.c0)) {
    config.c0 = default_c0_path(data.num_examples(), data.num_features());
  }
  const auto path = regularization_path(config, data);
  write_path_csv(path, std::cout);
  const auto best = best_path_point(path);
  if (!best) {
    std::cerr << "no C0 on the path produced a model\n";
    return kExitNoIncumbent;
  }
  const PathPoint& p = path[*best];
  std::cout << "\nbest C0 " << p.c0 << " (mean CV test error " << p.cv->test_error.mean << ")\n"
            << render_table(p.final_model->model);
  if (!config.output_dir.empty()) {
    write_train_outputs(config.output_dir, *p.final_model, &*p.cv);
    std::ofstream out(std::filesystem::path(config.output_dir) / "path.csv");
    write_path_csv(path, out);
  }
  return 0;
}

int run_reduce(const CommonFlags& flags, const std::string& epsilon_text) {
  const RunConfig config = resolve(flags);
  const Dataset data = load_dataset(config);
  const IPInstance inst = build_instance(config, data, config.c0.front());
  double epsilon = 0.0;
  if (epsilon_text == "max" || epsilon_text == "model") {
    std::optional<ScoringSystem> model;
    if (epsilon_text == "model") {
      const auto c = polish(inst, std::vector<int>(inst.lambda.size(), 0));
      if (!c) throw InputError("no feasible model found to derive epsilon from");
      model = decode(inst, c->lambda);
    }
    const EpsilonBounds eb = epsilon_bounds(inst, model);
    epsilon = model ? *eb.eps_model : eb.eps_max;
    if (!std::isfinite(epsilon)) throw InputError("the zero model is infeasible; give epsilon explicitly");
  } else {
    try {
      epsilon = std::stod(epsilon_text);
    } catch (const std::exception&) {
      throw InputError("epsilon must be a number, 'max' or 'model'");
    }
  }
  const Reduction red = reduce(inst, epsilon);
  std::cout << "epsilon " << epsilon << ": kept " << red.report.m() << " of " << red.report.verdicts.size()
            << " examples (removed " << 100.0 * red.report.removed_fraction << "%)\n";
  if (!config.output_dir.empty()) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    save_csv(red.data, config.label, dir / "reduced.csv");
    std::ofstream(dir / "reduction.json") << report_to_json(red.report) << '\n';
  }
  return 0;
}

int run_bounds(std::size_t p, std::vector<int> lambdas, double c0, double delta, std::size_t n, const std::string& csv) {
  std::ostringstream table;
  table << "lambda,full_count,occam_bound,sparse_count,sparse_bound";
  const bool enumerate = std::pow(2.0 * lambdas.back() + 1.0, static_cast<double>(p)) * p <= kMaxEnumeration;
  if (enumerate) table << ",coprime_count,coprime_density,farey_count,farey_bound";
  table << '\n';
  for (int lam : lambdas) {
    const BigInt full = full_count(p, lam);
    const BigInt sparse = sparse_hypothesis_count(p, lam, c0);
    table << lam << ',' << full << ',' << occam_bound(full, delta, n) << ',' << sparse << ','
          << occam_bound(sparse, delta, n);
    if (enumerate) {
      const BigInt farey = farey_count(p, lam);
      table << ',' << coprime_count(p, lam) << ',' << coprime_density(p, lam) << ',' << farey << ','
            << occam_bound(farey, delta, n);
    }
    table << '\n';
  }
  std::cout << table.str();
  if (!csv.empty()) std::ofstream(csv) << table.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse integer scoring systems"};
  app.require_subcommand(1);

  CommonFlags train_flags, cv_flags, path_flags, reduce_flags;
  auto* train_cmd = app.add_subcommand("train", "train one model on all of the data");
  add_common(train_cmd, train_flags);
  auto* cv_cmd = app.add_subcommand("cv", "stratified k-fold cross-validation");
  add_common(cv_cmd, cv_flags);
  auto* path_cmd = app.add_subcommand("path", "l0 regularization path over C0 values");
  add_common(path_cmd, path_flags);
  auto* reduce_cmd = app.add_subcommand("reduce", "drop examples whose prediction is fixed");
  add_common(reduce_cmd, reduce_flags);
  std::string epsilon_text = "max";
  reduce_cmd->add_option("--epsilon", epsilon_text, "level-set width: a number, 'max' or 'model'");

  auto* bounds_cmd = app.add_subcommand("bounds", "hypothesis counts and generalization bounds");
  std::size_t bp = 2, bn = 100;
  int lambda_max = 10;
  double bc0 = 0.01, delta = 0.05;
  std::string csv;
  bounds_cmd->add_option("--p", bp, "number of features")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--lambda-max", lambda_max, "largest coefficient bound")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--c0", bc0, "l0 penalty")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--delta", delta, "confidence parameter");
  bounds_cmd->add_option("--n", bn, "number of training examples")->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--csv", csv, "also write the table to this file");

  auto* render_cmd = app.add_subcommand("render", "print a saved model as a points table");
  std::string model_path, outcome = "Y = +1";
  bool markdown = false;
  render_cmd->add_option("model", model_path, "model.json")->required();
  render_cmd->add_option("--outcome", outcome, "text after PREDICT");
  render_cmd->add_flag("--markdown", markdown, "Markdown table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*train_cmd) return run_train(train_flags);
    if (*cv_cmd) return run_cv(cv_flags);
    if (*path_cmd) return run_path(path_flags);
    if (*reduce_cmd) return run_reduce(reduce_flags, epsilon_text);
    if (*bounds_cmd) {
      std::vector<int> lambdas;
      for (int l = 1; l <= lambda_max; ++l) lambdas.push_back(l);
      return run_bounds(bp, lambdas, bc0, delta, bn, csv);
    }
    if (*render_cmd) {
      std::cout << render_table(load_model(model_path), {outcome, markdown});
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
