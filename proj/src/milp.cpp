#include "slim/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>
#include <set>

namespace slim {

namespace {

constexpr double kLossTol = 1e-9;
constexpr double kIntTol = 1e-6;
constexpr std::size_t kPlungeEvery = 50;
constexpr std::size_t kMaxPolishCache = 200000;

struct PsiRow {
  std::vector<std::size_t> examples;
  double upper;
};

// Fast objective evaluation for one-coefficient moves. The loss part is
// computed from scores; the rest comes from penalty_value().
class Polisher {
 public:
  explicit Polisher(const IPInstance& inst) : inst_(inst), data_(*inst.data) {
    w_.resize(data_.num_examples());
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = inst.objective[inst.psi[i]];
    std::vector<std::ptrdiff_t> example_of(inst.num_vars(), -1);
    for (std::size_t i = 0; i < inst.psi.size(); ++i) example_of[inst.psi[i]] = static_cast<std::ptrdiff_t>(i);
    for (const auto& r : inst.rows) {
      if (r.family != "max_fpr" && r.family != "min_tpr") continue;
      PsiRow pr{{}, r.upper};
      for (const auto& [k, a] : r.terms) {
        if (example_of[k] >= 0 && a == 1.0) pr.examples.push_back(static_cast<std::size_t>(example_of[k]));
      }
      psi_rows_.push_back(std::move(pr));
    }
    lo0_ = inst.coeffs.lower(0);
    hi0_ = inst.coeffs.upper(0);
  }

  // Best lambda_0 for the given non-intercept scores: (value, weighted loss).
  std::optional<std::pair<int, double>> BestIntercept(const std::vector<double>& s) const {
    const std::size_t range = static_cast<std::size_t>(hi0_ - lo0_ + 1);
    std::vector<double> loss(range + 1, 0.0);
    std::vector<std::vector<int>> counts(psi_rows_.size(), std::vector<int>(range + 1, 0));
    std::vector<std::pair<std::size_t, std::size_t>> err(s.size());  // error interval [a, b)
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::size_t a = 0;
      std::size_t b = 0;
      if (data_.y(i) > 0) {
        // error iff b < gamma - s_i - tol
        const double first_ok = std::ceil(inst_.gamma - s[i] - kLossTol);
        const double end = std::clamp(first_ok - lo0_, 0.0, static_cast<double>(range));
        a = 0;
        b = static_cast<std::size_t>(end);
      } else {
        const double last_ok = std::floor(-inst_.gamma - s[i] + kLossTol);
        const double start = std::clamp(last_ok + 1 - lo0_, 0.0, static_cast<double>(range));
        a = static_cast<std::size_t>(start);
        b = range;
      }
      err[i] = {a, b};
      if (a < b) {
        loss[a] += w_[i];
        loss[b] -= w_[i];
      }
    }
    for (std::size_t r = 0; r < psi_rows_.size(); ++r) {
      for (std::size_t i : psi_rows_[r].examples) {
        if (err[i].first < err[i].second) {
          ++counts[r][err[i].first];
          --counts[r][err[i].second];
        }
      }
    }
    std::optional<std::pair<int, double>> best;
    double run = 0.0;
    std::vector<int> run_counts(psi_rows_.size(), 0);
    for (std::size_t k = 0; k < range; ++k) {
      run += loss[k];
      bool ok = true;
      for (std::size_t r = 0; r < psi_rows_.size(); ++r) {
        run_counts[r] += counts[r][k];
        if (run_counts[r] > psi_rows_[r].upper + 1e-9) ok = false;
      }
      const int b = lo0_ + static_cast<int>(k);
      if (!ok || !inst_.coeffs.contains(0, b)) continue;
      if (!best || run < best->second - 1e-15 ||
          (std::abs(run - best->second) <= 1e-15 && std::abs(b) < std::abs(best->first))) {
        best = std::make_pair(b, run);
      }
    }
    return best;
  }

  std::optional<Candidate> Run(std::vector<int> lambda) const {
    const std::size_t cols = data_.num_columns();
    const std::size_t n = data_.num_examples();
    for (std::size_t j = 0; j < cols; ++j) {
      if (!inst_.coeffs.contains(j, lambda[j])) lambda[j] = inst_.coeffs.snap(j, lambda[j]);
    }
    std::vector<double> s(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 1; j < cols; ++j) s[i] += lambda[j] * data_.x(i, j);
    }

    std::optional<Candidate> best;
    double current = kInf;
    auto verify = [&](const std::vector<int>& lam) -> std::optional<double> {
      const auto x = complete(inst_, lam);
      if (!x) return std::nullopt;
      return evaluate(inst_, *x);
    };

    if (const auto pen = penalty_value(inst_, lambda)) {
      if (const auto bi = BestIntercept(s)) {
        std::vector<int> lam = lambda;
        lam[0] = bi->first;
        if (const auto f = verify(lam)) {
          lambda = lam;
          current = *f;
        }
      }
    }
    if (!std::isfinite(current)) {
      if (const auto f = verify(lambda)) current = *f;
    }

    std::vector<double> s2(n);
    struct Move {
      double f;
      int v;
      int b;
    };
    for (int pass = 0; pass < 50; ++pass) {
      bool improved = false;
      for (std::size_t j = 1; j < cols; ++j) {
        if (inst_.coeffs.lower(j) == inst_.coeffs.upper(j)) continue;
        std::vector<Move> moves;
        for (int v : inst_.coeffs.values(j)) {
          if (v == lambda[j]) continue;
          std::vector<int> lam = lambda;
          lam[j] = v;
          const auto pen = penalty_value(inst_, lam);
          if (!pen) continue;
          const double dv = v - lambda[j];
          for (std::size_t i = 0; i < n; ++i) s2[i] = s[i] + dv * data_.x(i, j);
          const auto bi = BestIntercept(s2);
          if (!bi) continue;
          const double f = bi->second + *pen + inst_.objective_offset;
          if (f < current - 1e-12) moves.push_back({f, v, bi->first});
        }
        std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) { return a.f < b.f; });
        for (const Move& mv : moves) {
          std::vector<int> lam = lambda;
          lam[j] = mv.v;
          lam[0] = mv.b;
          const auto f = verify(lam);
          if (!f || *f >= current - 1e-12) continue;
          const double dv = mv.v - lambda[j];
          for (std::size_t i = 0; i < n; ++i) s[i] += dv * data_.x(i, j);
          lambda = lam;
          current = *f;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (std::isfinite(current)) best = Candidate{lambda, current};
    return best;
  }

 private:
  const IPInstance& inst_;
  const Dataset& data_;
  std::vector<double> w_;
  std::vector<PsiRow> psi_rows_;
  int lo0_ = 0;
  int hi0_ = 0;
};

struct Node {
  std::vector<int> lo;
  std::vector<int> hi;
  double bound = -kInf;
  std::size_t depth = 0;
  std::size_t id = 0;
};

struct NodeWorse {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id > b.id;
  }
};

// Bounds on auxiliary variables implied by the coefficient box.
void propagate(const IPInstance& inst, const Node& node, DualSimplex& lp) {
  const std::size_t cols = node.lo.size();
  for (std::size_t j = 0; j < cols; ++j) lp.SetBounds(inst.lambda[j], node.lo[j], node.hi[j]);
  for (std::size_t j = 1; j < cols; ++j) {
    const int lo = node.lo[j];
    const int hi = node.hi[j];
    if (inst.alpha.size() > j && inst.alpha[j] != kNone) {
      lp.SetBounds(inst.alpha[j], (lo > 0 || hi < 0) ? 1.0 : 0.0, (lo == 0 && hi == 0) ? 0.0 : 1.0);
    }
    if (inst.beta.size() > j && inst.beta[j] != kNone) {
      const double blo = lo > 0 ? lo : (hi < 0 ? -hi : 0);
      lp.SetBounds(inst.beta[j], blo, std::max(std::abs(lo), std::abs(hi)));
    }
    if (inst.selectors.size() > j) {
      for (const auto& sel : inst.selectors[j]) {
        lp.SetBounds(sel.var, 0.0, (sel.value < lo || sel.value > hi) ? 0.0 : 1.0);
      }
    }
  }
  for (std::size_t g = 0; g < inst.groups.size(); ++g) {
    bool any_pos = false;
    bool any_neg = false;
    bool all_zero = true;
    for (std::size_t j : inst.groups[g]) {
      any_pos |= node.lo[j] > 0;
      any_neg |= node.hi[j] < 0;
      all_zero &= node.lo[j] == 0 && node.hi[j] == 0;
    }
    lp.SetBounds(inst.delta[g], any_pos ? 1.0 : 0.0, any_neg ? 0.0 : 1.0);
    lp.SetBounds(inst.nu[g], (any_pos || any_neg) ? 1.0 : 0.0, all_zero ? 0.0 : 1.0);
  }
  const Dataset& data = *inst.data;
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    double best = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double a = data.y(i) * data.x(i, j);
      best += std::max(a * node.lo[j], a * node.hi[j]);
    }
    lp.SetBounds(inst.psi[i], inst.gamma - best > kLossTol ? 1.0 : 0.0, 1.0);
  }
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasibleBudgetExhausted:
      return "feasible-budget-exhausted";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kNoIncumbent:
      return "no-incumbent";
  }
  return "unknown";
}

LPProblem lp_relaxation(const IPInstance& instance) {
  LPProblem lp;
  lp.cost = instance.objective;
  for (const auto& v : instance.vars) {
    lp.lower.push_back(v.lower);
    lp.upper.push_back(v.upper);
  }
  for (const auto& r : instance.rows) lp.rows.push_back({r.terms, r.lower, r.upper});
  return lp;
}

std::optional<Candidate> polish(const IPInstance& instance, std::vector<int> start) {
  return Polisher(instance).Run(std::move(start));
}

SolveResult branch_and_bound(const IPInstance& inst, const SolveOptions& opt) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  SolveResult res;
  const std::size_t cols = inst.lambda.size();
  DualSimplex lp(lp_relaxation(inst));
  const Polisher polisher(inst);
  std::set<std::vector<int>> polished;

  auto cutoff = [&] {
    if (!res.incumbent) return kInf;
    return res.incumbent_objective - 1e-10 * std::max(1.0, std::abs(res.incumbent_objective));
  };
  auto offer = [&](const std::vector<int>& lam) {
    const auto x = complete(inst, lam);
    if (!x) return;
    const double f = evaluate(inst, *x);
    if (!res.incumbent || f < res.incumbent_objective - 1e-12) {
      res.incumbent = lam;
      res.assignment = *x;
      res.incumbent_objective = f;
    }
  };
  auto try_start = [&](const std::vector<int>& lam) {
    offer(lam);
    if (!opt.polish) return;
    if (polished.size() >= kMaxPolishCache || !polished.insert(lam).second) return;
    if (const auto c = polisher.Run(lam)) offer(c->lambda);
  };

  try_start(std::vector<int>(cols, 0));
  if (opt.start) try_start(*opt.start);

  if (opt.trace) *opt.trace << "node\tdepth\tbound\tincumbent\tdecision\n";
  auto trace = [&](const Node& node, double bound, const std::string& decision) {
    if (!opt.trace) return;
    *opt.trace << node.id << '\t' << node.depth << '\t' << fmt_double(bound) << '\t'
               << fmt_double(res.incumbent ? res.incumbent_objective : kInf) << '\t' << decision << '\n';
  };

  Node root;
  for (std::size_t j = 0; j < cols; ++j) {
    root.lo.push_back(inst.coeffs.lower(j));
    root.hi.push_back(inst.coeffs.upper(j));
  }
  std::priority_queue<Node, std::vector<Node>, NodeWorse> open;
  open.push(root);
  std::optional<Node> dive;
  bool diving = false;
  std::size_t next_id = 1;
  std::size_t since_plunge = 0;
  bool budget_hit = false;
  bool gap_closed = false;
  double global_lb = -kInf;

  while (dive || !open.empty()) {
    double lb = kInf;
    if (dive) lb = dive->bound;
    if (!open.empty()) lb = std::min(lb, open.top().bound);
    global_lb = std::max(global_lb, std::min(lb, res.incumbent_objective));
    if (res.nodes_explored > 0) res.progress.emplace_back(global_lb, res.incumbent_objective);
    if (res.incumbent) {
      const double gap = (res.incumbent_objective - global_lb) / std::max(std::abs(res.incumbent_objective), 1e-10);
      if (gap <= opt.gap_tolerance) {
        gap_closed = true;
        break;
      }
    }
    if ((opt.time_limit > 0.0 && elapsed() >= opt.time_limit) ||
        (opt.node_limit > 0 && res.nodes_explored >= opt.node_limit)) {
      budget_hit = true;
      break;
    }

    Node node;
    if (dive) {
      node = std::move(*dive);
      dive.reset();
    } else {
      node = open.top();
      open.pop();
      diving = false;
    }
    if (node.bound >= cutoff()) {
      trace(node, node.bound, "prune");
      diving = false;
      continue;
    }

    propagate(inst, node, lp);
    const LPStatus status = lp.Solve();
    ++res.nodes_explored;
    ++since_plunge;
    if (status == LPStatus::kInfeasible) {
      trace(node, node.bound, "infeasible");
      diving = false;
      continue;
    }

    double bound = node.bound;
    std::vector<double> val(cols);
    if (status == LPStatus::kOptimal) {
      bound = std::max(bound, lp.Objective() + inst.objective_offset);
      const std::vector<double> x = lp.Primal();
      for (std::size_t j = 0; j < cols; ++j) val[j] = std::clamp(x[inst.lambda[j]], double(node.lo[j]), double(node.hi[j]));
    } else {
      for (std::size_t j = 0; j < cols; ++j) val[j] = 0.5 * (node.lo[j] + node.hi[j]);
    }
    if (res.nodes_explored == 1) res.root_bound = bound;
    if (bound >= cutoff()) {
      trace(node, bound, "prune");
      diving = false;
      continue;
    }

    std::vector<int> rounded(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      rounded[j] = std::clamp(inst.coeffs.snap(j, val[j]), node.lo[j], node.hi[j]);
    }
    try_start(rounded);
    if (bound >= cutoff()) {
      trace(node, bound, "prune");
      diving = false;
      continue;
    }

    // Branching variable: most fractional coefficient.
    std::ptrdiff_t pick = -1;
    double best_frac = kIntTol;
    for (std::size_t j = 0; j < cols; ++j) {
      if (node.lo[j] == node.hi[j]) continue;
      const double f = val[j] - std::floor(val[j]);
      const double frac = std::min(f, 1.0 - f);
      if (frac <= kIntTol) continue;
      const auto better = [&] {
        if (pick < 0 || frac > best_frac + 1e-12) return true;
        if (frac < best_frac - 1e-12) return false;
        return std::abs(inst.objective[inst.lambda[j]]) >
               std::abs(inst.objective[inst.lambda[static_cast<std::size_t>(pick)]]);
      };
      if (better()) {
        pick = static_cast<std::ptrdiff_t>(j);
        best_frac = frac;
      }
    }

    std::vector<Node> children;
    std::size_t preferred = 0;
    std::string decision;
    if (pick >= 0) {
      const std::size_t j = static_cast<std::size_t>(pick);
      const int fl = static_cast<int>(std::floor(val[j]));
      Node down = node;
      Node up = node;
      down.hi[j] = fl;
      up.lo[j] = fl + 1;
      children = {down, up};
      preferred = val[j] - fl >= 0.5 ? 1 : 0;
      decision = "branch lambda_" + std::to_string(j) + " <= " + std::to_string(fl) + " | >= " + std::to_string(fl + 1);
    } else {
      // Coefficients integral: split an unfixed one three ways so that the
      // auxiliaries get fixed by propagation. Prefer features over the
      // intercept.
      std::ptrdiff_t j3 = -1;
      for (std::size_t j = 1; j < cols && j3 < 0; ++j) {
        if (node.lo[j] != node.hi[j]) j3 = static_cast<std::ptrdiff_t>(j);
      }
      if (j3 < 0 && node.lo[0] != node.hi[0]) j3 = 0;
      if (j3 < 0) {
        trace(node, bound, "leaf");
        diving = false;
        continue;
      }
      const std::size_t j = static_cast<std::size_t>(j3);
      const int v = static_cast<int>(std::lround(val[j]));
      Node eq = node;
      eq.lo[j] = eq.hi[j] = v;
      children.push_back(eq);
      if (v > node.lo[j]) {
        Node down = node;
        down.hi[j] = v - 1;
        children.push_back(down);
      }
      if (v < node.hi[j]) {
        Node up = node;
        up.lo[j] = v + 1;
        children.push_back(up);
      }
      preferred = 0;
      decision = "branch lambda_" + std::to_string(j) + " = " + std::to_string(v);
    }
    trace(node, bound, decision);

    for (auto& c : children) {
      c.bound = bound;
      c.depth = node.depth + 1;
      c.id = next_id++;
    }
    if (!diving && since_plunge >= kPlungeEvery) {
      diving = true;
      since_plunge = 0;
    }
    for (std::size_t k = 0; k < children.size(); ++k) {
      if (diving && k == preferred) {
        dive = std::move(children[k]);
      } else {
        open.push(std::move(children[k]));
      }
    }
  }

  res.wall_time = elapsed();
  if (res.incumbent) {
    if (!budget_hit && !gap_closed) global_lb = res.incumbent_objective;
    res.lower_bound = std::min(global_lb, res.incumbent_objective);
    res.gap = std::max(0.0, (res.incumbent_objective - res.lower_bound) /
                                std::max(std::abs(res.incumbent_objective), 1e-10));
    res.status = res.gap <= opt.gap_tolerance ? SolveStatus::kOptimal : SolveStatus::kFeasibleBudgetExhausted;
  } else {
    res.lower_bound = budget_hit ? global_lb : kInf;
    res.status = budget_hit ? SolveStatus::kNoIncumbent : SolveStatus::kInfeasible;
  }
  return res;
}

namespace {

// Odometer over the value lists; calls fn(lambda) for every point.
template <class Fn>
std::size_t enumerate_box(const std::vector<std::vector<int>>& values, Fn&& fn) {
  double space = 1.0;
  for (const auto& v : values) space *= static_cast<double>(v.size());
  if (space > kMaxOracleSpace) {
    throw InputError("exhaustive search space has " + std::to_string(static_cast<long double>(space)) +
                     " points, limit is " + std::to_string(static_cast<long long>(kMaxOracleSpace)));
  }
  std::vector<std::size_t> idx(values.size(), 0);
  std::vector<int> lam(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) lam[j] = values[j][0];
  std::size_t count = 0;
  while (true) {
    fn(lam);
    ++count;
    std::size_t j = 0;
    while (j < values.size()) {
      if (++idx[j] < values[j].size()) {
        lam[j] = values[j][idx[j]];
        break;
      }
      idx[j] = 0;
      lam[j] = values[j][0];
      ++j;
    }
    if (j == values.size()) break;
  }
  return count;
}

// Keeps every point within `tie` of the running best.
class OptimaCollector {
 public:
  explicit OptimaCollector(double tie) : tie_(tie) {}
  void Add(const std::vector<int>& lam, double f) {
    if (f < best_ - tie_) points_.clear();
    if (f <= best_ + tie_) points_.emplace_back(f, lam);
    best_ = std::min(best_, f);
  }
  void Finish(OracleResult& out) const {
    out.objective = best_;
    for (const auto& [f, lam] : points_) {
      if (f <= best_ + tie_) out.optima.push_back(lam);
    }
  }

 private:
  double tie_;
  double best_ = kInf;
  std::vector<std::pair<double, std::vector<int>>> points_;
};

}  // namespace

OracleResult exhaustive_oracle(const Dataset& data, const CoefficientSet& coeffs, double c0, double eps,
                               const ClassWeights& weights, const std::vector<ConstraintSpec>& constraints,
                               double tie_tolerance) {
  const std::size_t n = data.num_examples();
  const std::size_t cols = data.num_columns();
  std::vector<double> c0j(cols, c0);
  c0j[0] = 0.0;
  const auto& missing = data.missing_counts();
  for (std::size_t j = 1; j < cols && j < missing.size(); ++j) {
    if (missing[j] > 0) c0j[j] = missing_data_penalty(c0, std::min(missing[j], n), n);
  }
  for (const auto& spec : constraints) {
    if (const auto* w = std::get_if<PerFeaturePenalty>(&spec)) c0j[w->feature] = w->c0;
  }

  auto allowed = [&](const std::vector<int>& lam, std::size_t pos_err, std::size_t neg_err) {
    std::size_t l0 = 0;
    for (std::size_t j = 1; j < cols; ++j) l0 += lam[j] != 0;
    for (const auto& spec : constraints) {
      if (const auto* c = std::get_if<MaxFPR>(&spec)) {
        if (neg_err > std::floor(c->gamma_fpr * data.n_neg() + 1e-9)) return false;
      } else if (const auto* c = std::get_if<MinTPR>(&spec)) {
        if (pos_err > std::floor((1.0 - c->tpr) * data.n_pos() + 1e-9)) return false;
      } else if (const auto* c = std::get_if<MaxModelSize>(&spec)) {
        if (l0 > c->theta) return false;
      } else if (const auto* c = std::get_if<Sign>(&spec)) {
        if (c->sign * lam[c->feature] < 0) return false;
      } else if (const auto* c = std::get_if<PinZero>(&spec)) {
        if (lam[c->feature] != 0) return false;
      } else if (const auto* c = std::get_if<IfThen>(&spec)) {
        bool any = false;
        for (std::size_t a : c->antecedents) any |= lam[a] != 0;
        if (any && lam[c->consequent] == 0) return false;
      } else if (const auto* c = std::get_if<Hierarchy>(&spec)) {
        if (lam[c->leaf] != 0) {
          for (std::size_t node : c->nodes) {
            if (lam[node] == 0) return false;
          }
        }
      }
    }
    return true;
  };

  std::vector<std::vector<int>> values;
  for (std::size_t j = 0; j < cols; ++j) values.push_back(coeffs.values(j));
  OracleResult out;
  OptimaCollector optima(tie_tolerance);
  out.evaluated = enumerate_box(values, [&](const std::vector<int>& lam) {
    std::size_t pos_err = 0;
    std::size_t neg_err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += lam[j] * data.x(i, j);
      if (data.y(i) * s <= 0.0) ++(data.y(i) > 0 ? pos_err : neg_err);
    }
    if (!allowed(lam, pos_err, neg_err)) return;
    double f = (weights.w_pos * pos_err + weights.w_neg * neg_err) / static_cast<double>(n);
    for (std::size_t j = 1; j < cols; ++j) {
      if (lam[j] != 0) f += c0j[j];
    }
    double l1 = 0.0;
    for (std::size_t j = 1; j < cols; ++j) l1 += std::abs(lam[j]);
    f += eps * l1;
    optima.Add(lam, f);
  });
  optima.Finish(out);
  return out;
}

OracleResult enumerate_instance(const IPInstance& instance, double tie_tolerance) {
  std::vector<std::vector<int>> values;
  for (std::size_t j = 0; j < instance.coeffs.size(); ++j) values.push_back(instance.coeffs.values(j));
  OracleResult out;
  OptimaCollector optima(tie_tolerance);
  out.evaluated = enumerate_box(values, [&](const std::vector<int>& lam) {
    const auto x = complete(instance, lam);
    if (x) optima.Add(lam, evaluate(instance, *x));
  });
  optima.Finish(out);
  return out;
}

}  // namespace slim
