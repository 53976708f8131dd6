// Acceptance checks. One line per criterion: PASS, FAIL or SKIP plus a short
// detail. Exit status 0 pass, 1 fail, 77 skip.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "slim/experiment.hpp"
#include "slim/milp.hpp"
#include "slim/reduce.hpp"
#include "slim/theory.hpp"

namespace {

using namespace slim;
namespace fs = std::filesystem;

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

struct Options {
  fs::path data_dir = fs::path(SLIM_SOURCE_DIR) / "data";
  double time_limit = 10.0;          // per IP on breastcancer
  double bankruptcy_limit = 600.0;   // per IP on bankruptcy
};

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string Fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

long Gcd(long a, long b) {
  a = std::labs(a);
  b = std::labs(b);
  while (b) {
    const long r = a % b;
    a = b;
    b = r;
  }
  return a;
}

template <typename F>
void EachVector(std::size_t p, int lo, int hi, F f) {
  std::vector<int> z(p, lo);
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == p) {
      f(z);
      return;
    }
    for (int v = lo; v <= hi; ++v) {
      z[j] = v;
      rec(j + 1);
    }
  };
  rec(0);
}

// ---- random instances -------------------------------------------------------

std::vector<std::string> Names(std::size_t p) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

// Binary or small-integer features; labels from a planted rule with flips or
// uniformly random. Both classes present.
Dataset RandomData(std::mt19937& rng, std::size_t n, std::size_t p) {
  std::bernoulli_distribution coin(0.5);
  const bool binary = coin(rng), planted = coin(rng);
  std::uniform_int_distribution<int> feat(binary ? 0 : -2, binary ? 1 : 2), w(-2, 2);
  std::bernoulli_distribution flip(0.1);
  std::vector<int> rule(p + 1);
  for (int& v : rule) v = w(rng);
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rule[0] + 0.5;
    for (std::size_t j = 0; j < p; ++j) s += rule[j + 1] * (rows[i][j] = feat(rng));
    y[i] = planted ? ((s > 0) != flip(rng) ? 1 : -1) : (coin(rng) ? 1 : -1);
  }
  y[0] = 1;
  y[1] = -1;
  return Dataset::FromRows(rows, y, Names(p));
}

struct Instance {
  Dataset data;
  CoefficientSet coeffs;
  double c0 = 0.0;
  double eps = 0.0;
};

// N <= 20, P <= 4, L = {-3..3}^{P+1}, C0 in (0, 1].
std::vector<Instance> OracleInstances() {
  std::mt19937 rng(20150901);
  std::uniform_int_distribution<int> nn(2, 20), pp(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Instance> out;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = nn(rng), p = pp(rng);
    Instance in{RandomData(rng, n, p), CoefficientSet::Uniform(p, 3, 3), 1.0 - u(rng), 0.0};
    in.eps = default_epsilon(in.c0, n, in.coeffs);
    out.push_back(std::move(in));
  }
  return out;
}

// ---- criteria -------------------------------------------------------------------

Outcome OracleOptimality() {
  Stopwatch clock;
  std::size_t ok = 0;
  std::string first_bad;
  const auto instances = OracleInstances();
  for (std::size_t t = 0; t < instances.size(); ++t) {
    const Instance& in = instances[t];
    const IPInstance ip = build_slim(in.data, in.c0, in.eps, 0.1, in.coeffs, {}, {}, {.warn = false});
    SolveOptions opt;
    opt.time_limit = 0.0;
    const SolveResult r = branch_and_bound(ip, opt);
    const OracleResult oracle = exhaustive_oracle(in.data, in.coeffs, in.c0, in.eps, {}, {});
    bool good = r.status == SolveStatus::kOptimal && r.incumbent.has_value();
    if (good) {
      const ScoringSystem a(*r.incumbent, in.data.feature_names());
      const ScoringSystem b(oracle.optima.front(), in.data.feature_names());
      const Norms na = norms(a), nb = norms(b);
      good = zero_one_loss(a, in.data).count == zero_one_loss(b, in.data).count && na.l0 == nb.l0 &&
             std::abs(in.eps * static_cast<double>(na.l1 - nb.l1)) <= 1e-12;
    }
    if (good) {
      ++ok;
    } else if (first_bad.empty()) {
      first_bad = " first mismatch: instance " + std::to_string(t) + " status " + to_string(r.status);
    }
  }
  const double secs = clock.Seconds();
  const bool pass = ok == instances.size() && secs < 300.0;
  return {pass ? Verdict::kPass : Verdict::kFail,
          std::to_string(ok) + "/200 branch-and-bound optima match the exhaustive oracle in " + Fmt(secs) +
              " s (limit 300 s)" + first_bad};
}

Outcome Coprimality() {
  std::size_t coprime_ok = 0, subset_ok = 0, non_coprime_intercept_only = 0;
  const auto instances = OracleInstances();
  for (const Instance& in : instances) {
    const OracleResult full = exhaustive_oracle(in.data, in.coeffs, in.c0, in.eps, {}, {});
    const OracleResult plain = exhaustive_oracle(in.data, in.coeffs, in.c0, 0.0, {}, {});
    bool coprime = true, intercept_only = true;
    for (const auto& lam : full.optima) {
      long g = 0;
      for (int v : lam) g = Gcd(g, v);
      if (g > 1) {
        coprime = false;
        intercept_only = intercept_only && std::all_of(lam.begin() + 1, lam.end(), [](int v) { return v == 0; });
      }
    }
    coprime_ok += coprime;
    non_coprime_intercept_only += !coprime && intercept_only;
    const std::set<std::vector<int>> plain_set(plain.optima.begin(), plain.optima.end());
    subset_ok += std::all_of(full.optima.begin(), full.optima.end(),
                             [&](const std::vector<int>& lam) { return plain_set.count(lam) > 0; });
  }
  const bool pass = coprime_ok == instances.size() && subset_ok == instances.size();
  std::string detail = std::to_string(coprime_ok) + "/200 instances with only coprime optima, " +
                       std::to_string(subset_ok) + "/200 with optima inside the eps=0 optima";
  if (coprime_ok < instances.size()) {
    detail += "; " + std::to_string(non_coprime_intercept_only) + " of the " +
              std::to_string(instances.size() - coprime_ok) +
              " non-coprime cases are intercept-only ties (the l1 term does not cover the intercept)";
  }
  return {pass ? Verdict::kPass : Verdict::kFail, detail};
}

Outcome Regimes() {
  std::mt19937 rng(1306);
  std::uniform_int_distribution<int> nn(2, 15), pp(1, 3), cap(1, 3);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::size_t low_ok = 0, high_ok = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = nn(rng), p = pp(rng);
    const Dataset d = RandomData(rng, n, p);
    const CoefficientSet c = CoefficientSet::Uniform(p, cap(rng), 3);
    const double c0 = u(rng) / static_cast<double>(n * p);
    const OracleResult opt = exhaustive_oracle(d, c, c0, default_epsilon(c0, n, c), {}, {});
    const OracleResult best_loss = exhaustive_oracle(d, c, 0.0, 0.0, {}, {});
    const std::size_t min_errors = zero_one_loss(ScoringSystem(best_loss.optima.front(), d.feature_names()), d).count;
    low_ok += std::all_of(opt.optima.begin(), opt.optima.end(), [&](const std::vector<int>& lam) {
      return zero_one_loss(ScoringSystem(lam, d.feature_names()), d).count == min_errors;
    });
  }
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = nn(rng), p = pp(rng);
    const Dataset d = RandomData(rng, n, p);
    const CoefficientSet c = CoefficientSet::Uniform(p, cap(rng), 3);
    const double c0 = 1.0 - 1.0 / static_cast<double>(n) + u(rng) / static_cast<double>(n);
    const OracleResult opt = exhaustive_oracle(d, c, c0, default_epsilon(c0, n, c), {}, {});
    high_ok += std::all_of(opt.optima.begin(), opt.optima.end(), [&](const std::vector<int>& lam) {
      return std::all_of(lam.begin() + 1, lam.end(), [](int v) { return v == 0; });
    });
  }
  const bool pass = low_ok == 50 && high_ok == 50;
  return {pass ? Verdict::kPass : Verdict::kFail,
          "C0 < 1/(NP): " + std::to_string(low_ok) + "/50 with every optimum at minimum 0-1 loss; C0 > 1 - 1/N: " +
              std::to_string(high_ok) + "/50 with every optimum using no features"};
}

Outcome Resolution() {
  std::mt19937 rng(2718281);
  std::uniform_int_distribution<int> pp(1, 5), nn(2, 50);
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution noise(0.1);
  std::size_t k1 = 0, k23 = 0, k23_total = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = pp(rng), n = nn(rng);
    std::vector<double> rho(p);
    for (double& r : rho) r = g(rng);
    std::vector<std::vector<double>> x(n, std::vector<double>(p));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < p; ++j) s += rho[j] * (x[i][j] = 3.0 * g(rng));
      y[i] = (s > 0) != noise(rng) ? 1 : -1;
    }
    const MarginProfile prof = margin_profile(x, rho);
    const std::size_t base = zero_one_errors(x, y, rho);
    auto rounded_errors = [&](std::size_t k) {
      const auto lam = round_at_resolution(rho, smallest_admissible_lambda(min_resolution(prof, k)));
      return zero_one_errors(x, y, std::vector<double>(lam.begin(), lam.end()));
    };
    k1 += rounded_errors(1) <= base;
    for (std::size_t k : {2u, 3u}) {
      if (k > n) continue;
      ++k23_total;
      k23 += rounded_errors(k) <= base + (k - 1);
    }
  }
  const bool pass = k1 == 100 && k23 == k23_total;
  return {pass ? Verdict::kPass : Verdict::kFail,
          "k=1: " + std::to_string(k1) + "/100 roundings without extra errors; k=2,3: " + std::to_string(k23) + "/" +
              std::to_string(k23_total) + " within k-1 extra errors"};
}

// Separable labels from a planted rule; with a small C0 the integrality gap
// is small enough for certified epsilons to remove examples.
Dataset SeparableData(std::mt19937& rng, std::size_t n, std::size_t p) {
  std::uniform_int_distribution<int> feat(-2, 2), w(-2, 2);
  std::vector<int> rule(p + 1);
  for (int& v : rule) v = w(rng);
  std::vector<std::vector<double>> rows(n, std::vector<double>(p));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rule[0] + 0.5;
    for (std::size_t j = 0; j < p; ++j) s += rule[j + 1] * (rows[i][j] = feat(rng));
    y[i] = s > 0 ? 1 : -1;
  }
  y[0] = 1;
  y[1] = -1;
  return Dataset::FromRows(rows, y, Names(p));
}

// Half the instances are generic; half are separable with small C0 so that
// reduction removes examples and the claim is exercised.
Outcome ReductionEquivalence() {
  std::mt19937 rng(5772);
  std::uniform_int_distribution<int> nn(2, 20), nn_sep(10, 20), pp(1, 3), cap(1, 2);
  std::uniform_real_distribution<double> cc(0.005, 0.2), cc_sep(0.002, 0.02);
  std::size_t equal = 0, contained = 0, with_removals = 0;
  std::string first_bad;
  for (int t = 0; t < 100; ++t) {
    const bool separable = t % 2 == 1;
    const std::size_t n = separable ? nn_sep(rng) : nn(rng), p = pp(rng);
    const Dataset d = separable ? SeparableData(rng, n, p) : RandomData(rng, n, p);
    const CoefficientSet c = CoefficientSet::Uniform(p, cap(rng), 2);
    const double c0 = separable ? cc_sep(rng) : cc(rng);
    const IPInstance inst = build_slim(d, c0, default_epsilon(c0, n, c), 0.1, c, {}, {}, {.warn = false});
    const OracleResult full = enumerate_instance(inst);
    const EpsilonBounds eb = epsilon_bounds(inst, decode(inst, full.optima.front()));
    const Reduction red = reduce(inst, *eb.eps_model);
    with_removals += !red.report.removed.empty();
    OracleResult small;
    if (red.report.m() == 0) {
      // nothing left to classify: every model without features is optimal
      small.objective = inst.objective_offset + red.report.offset;
      for (int v : c.values(0)) {
        std::vector<int> lam(p + 1, 0);
        lam[0] = v;
        small.optima.push_back(lam);
      }
    } else {
      small = enumerate_instance(reduced_instance(inst, red));
    }
    const bool same = std::abs(small.objective - full.objective) <= 1e-12;
    const std::set<std::vector<int>> small_set(small.optima.begin(), small.optima.end());
    const bool inside = std::all_of(full.optima.begin(), full.optima.end(),
                                    [&](const std::vector<int>& lam) { return small_set.count(lam) > 0; });
    equal += same;
    contained += inside;
    if ((!same || !inside) && first_bad.empty()) {
      first_bad = "; first violation: instance " + std::to_string(t) + " (N=" + std::to_string(n) + ", M=" +
                  std::to_string(red.report.m()) + ", D_N optimum " + Fmt(full.objective) + ", D_M optimum " +
                  Fmt(small.objective) + ")";
    }
  }
  const bool pass = equal == 100 && contained == 100;
  return {pass ? Verdict::kPass : Verdict::kFail,
          std::to_string(equal) + "/100 equal optimal objectives, " + std::to_string(contained) +
              "/100 with D_N optima among D_M optima, " + std::to_string(with_removals) +
              " instances removed examples" + first_bad};
}

std::optional<fs::path> Bankruptcy(const Options& o) {
  const fs::path path = o.data_dir / "bankruptcy.csv";
  if (!fs::exists(path)) return std::nullopt;
  return path;
}

std::string LastColumn(const fs::path& csv) {
  return read_csv_file(csv).header.back();
}

Outcome BankruptcyTraining(const Options& o) {
  const auto path = Bankruptcy(o);
  if (!path) return {Verdict::kSkip, (o.data_dir / "bankruptcy.csv").string() + " not found"};
  Stopwatch clock;
  RunConfig config;
  config.dataset = path->string();
  config.label = LastColumn(*path);
  config.c0 = {0.01};
  config.time_limit = o.bankruptcy_limit;
  const Dataset data = load_dataset(config);
  const TrainResult final_model = train(config, data, 0.01);
  const CVResult cv = cross_validate(config, data, 0.01);
  const bool pass = final_model.solve.incumbent && final_model.train.errors == 0 &&
                    final_model.model.model_size() <= 3 && cv.test_error.mean <= 0.03;
  return {pass ? Verdict::kPass : Verdict::kFail,
          "training error " + Fmt(100 * final_model.train.error) + "%, model size " +
              std::to_string(final_model.model.model_size()) + ", 10-CV test error " +
              Fmt(100 * cv.test_error.mean) + " +- " + Fmt(100 * cv.test_error.sd) + "% in " + Fmt(clock.Seconds()) +
              " s"};
}

Outcome BreastcancerPath(const Options& o) {
  const fs::path path = o.data_dir / "breastcancer.csv";
  if (!fs::exists(path)) return {Verdict::kSkip, path.string() + " not found"};
  Stopwatch clock;
  RunConfig config;
  config.dataset = path.string();
  config.label = LastColumn(path);
  config.time_limit = o.time_limit;
  const Dataset data = load_dataset(config);
  config.c0 = default_c0_path(data.num_examples(), data.num_features());
  const auto points = regularization_path(config, data);
  const auto best = best_path_point(points);
  if (!best) return {Verdict::kFail, "no C0 on the path produced a model"};
  const PathPoint& p = points[*best];
  const std::size_t size = p.final_model->model.model_size();
  const double err = p.cv->test_error.mean;
  const bool pass = size <= 3 && err <= 0.06;
  return {pass ? Verdict::kPass : Verdict::kFail,
          "best C0 " + Fmt(p.c0) + ": model size " + std::to_string(size) + ", 10-CV test error " + Fmt(100 * err) +
              " +- " + Fmt(100 * p.cv->test_error.sd) + "% (" + Fmt(o.time_limit) + " s per IP, " +
              Fmt(clock.Seconds()) + " s total)"};
}

Outcome BankruptcyReduction(const Options& o) {
  const auto path = Bankruptcy(o);
  if (!path) return {Verdict::kSkip, (o.data_dir / "bankruptcy.csv").string() + " not found"};
  RunConfig config;
  config.dataset = path->string();
  config.label = LastColumn(*path);
  config.c0 = {0.01};
  config.time_limit = o.bankruptcy_limit;
  const Dataset data = load_dataset(config);
  const IPInstance inst = build_instance(config, data, 0.01);
  SolveOptions opt;
  opt.time_limit = o.bankruptcy_limit;
  const SolveResult solved = branch_and_bound(inst, opt);
  if (!solved.incumbent) return {Verdict::kFail, "no feasible model to derive epsilon from"};
  const EpsilonBounds eb = epsilon_bounds(inst, decode(inst, *solved.incumbent));
  const double at_max = reduce(inst, eb.eps_max).report.removed_fraction;
  const double at_model = reduce(inst, *eb.eps_model).report.removed_fraction;
  bool monotone = true;
  double previous = 1.0;
  for (int k = 0; k < 10; ++k) {
    const double e = *eb.eps_model + (eb.eps_max - *eb.eps_model) * k / 9.0;
    const double f = reduce(inst, e).report.removed_fraction;
    monotone = monotone && f <= previous;
    previous = f;
  }
  const bool pass = at_max >= 0.25 && at_model >= at_max && monotone;
  return {pass ? Verdict::kPass : Verdict::kFail,
          "removed " + Fmt(100 * at_max) + "% at eps_max, " + Fmt(100 * at_model) + "% at eps from the " +
              (solved.status == SolveStatus::kOptimal ? "certified optimum" : "best incumbent (not certified)") +
              ", monotone on 10-point grid: " + (monotone ? "yes" : "no")};
}

Outcome Counting() {
  std::size_t sparse_ok = 0, coprime_ok = 0, cases = 0;
  for (std::size_t p = 1; p <= 4; ++p) {
    for (int cap = 1; cap <= 3; ++cap) {
      long coprime = 0;
      std::vector<long> by_size(p + 1, 0);
      EachVector(p, -cap, cap, [&](const std::vector<int>& z) {
        long g = 0;
        std::size_t nz = 0;
        for (int v : z) {
          g = Gcd(g, v);
          nz += v != 0;
        }
        coprime += g == 1;
        ++by_size[nz];
      });
      coprime_ok += coprime_count(p, cap) == coprime;
      for (double c0 : {0.05, 0.26, 0.34, 0.5, 0.9, 1.5}) {
        const std::size_t k_max = static_cast<std::size_t>(std::floor(1.0 / c0));
        long brute = 0;
        for (std::size_t k = 0; k <= std::min(k_max, p); ++k) brute += by_size[k];
        sparse_ok += sparse_hypothesis_count(p, cap, c0) == brute;
        ++cases;
      }
    }
  }
  std::size_t farey_ok = 0;
  for (int level = 1; level <= 12; ++level) {
    long length = 0;  // fractions a/q in [0, 1) in lowest terms, q <= level
    for (int q = 1; q <= level; ++q) {
      for (int a = 0; a < q; ++a) length += Gcd(a, q) == 1;
    }
    farey_ok += farey_count(1, level) == length;
  }
  const bool pass = sparse_ok == cases && coprime_ok == 12 && farey_ok == 12;
  return {pass ? Verdict::kPass : Verdict::kFail,
          "sparse counts " + std::to_string(sparse_ok) + "/" + std::to_string(cases) + ", coprime counts " +
              std::to_string(coprime_ok) + "/12, Farey lengths " + std::to_string(farey_ok) + "/12"};
}

Outcome InvariantSuites() {
  Stopwatch clock;
  std::vector<std::string> failed;
  std::size_t total = 0;
  std::istringstream list(SLIM_UNIT_TESTS);
  std::string exe;
  while (std::getline(list, exe, '|')) {
    if (exe.empty()) continue;
    ++total;
    const int status = std::system((exe + " --gtest_brief=1 > /dev/null 2>&1").c_str());
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) failed.push_back(fs::path(exe).filename());
  }
  const double secs = clock.Seconds();
  const bool pass = failed.empty() && secs <= 1800.0;
  std::string detail = std::to_string(total - failed.size()) + "/" + std::to_string(total) + " unit suites green in " +
                       Fmt(secs) + " s (limit 1800 s)";
  for (const auto& f : failed) detail += " " + f;
  return {pass ? Verdict::kPass : Verdict::kFail, detail};
}

const char* kTitles[] = {"",
                         "oracle optimality",
                         "coprime optima",
                         "C0 regimes",
                         "rounding at resolution",
                         "reduced data equivalence",
                         "bankruptcy training",
                         "breastcancer path",
                         "bankruptcy data reduction",
                         "counting oracles",
                         "invariant suites"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int criterion = 0;
  Options options;
  app.add_option("--criterion", criterion, "criterion number, 1-10")->required()->check(CLI::Range(1, 10));
  app.add_option("--data-dir", options.data_dir, "directory holding the bundled CSV files");
  app.add_option("--time-limit", options.time_limit, "seconds per IP on breastcancer");
  app.add_option("--bankruptcy-time-limit", options.bankruptcy_limit, "seconds per IP on bankruptcy");
  CLI11_PARSE(app, argc, argv);

  Outcome out;
  try {
    switch (criterion) {
      case 1: out = OracleOptimality(); break;
      case 2: out = Coprimality(); break;
      case 3: out = Regimes(); break;
      case 4: out = Resolution(); break;
      case 5: out = ReductionEquivalence(); break;
      case 6: out = BankruptcyTraining(options); break;
      case 7: out = BreastcancerPath(options); break;
      case 8: out = BankruptcyReduction(options); break;
      case 9: out = Counting(); break;
      case 10: out = InvariantSuites(); break;
    }
  } catch (const std::exception& e) {
    out = {Verdict::kFail, std::string("error: ") + e.what()};
  }
  const char* tag = out.verdict == Verdict::kPass ? "PASS" : out.verdict == Verdict::kFail ? "FAIL" : "SKIP";
  std::cout << tag << " criterion " << criterion << " (" << kTitles[criterion] << "): " << out.detail << std::endl;
  return out.verdict == Verdict::kPass ? 0 : out.verdict == Verdict::kFail ? 1 : 77;
}
