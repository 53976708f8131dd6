#include "slim/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slim {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr std::size_t kRefactorEvery = 500;
constexpr std::size_t kDegenerateLimit = 50;

double viol(double x, double lo, double hi) {
  const double tl = kPrimalTol * std::max(1.0, std::abs(lo));
  const double th = kPrimalTol * std::max(1.0, std::abs(hi));
  if (x < lo - tl) return lo - x;
  if (x > hi + th) return x - hi;
  return 0.0;
}

}  // namespace

const char* to_string(LPStatus status) {
  switch (status) {
    case LPStatus::kOptimal:
      return "optimal";
    case LPStatus::kInfeasible:
      return "infeasible";
    case LPStatus::kUnbounded:
      return "unbounded";
    case LPStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "unknown";
}

DualSimplex::DualSimplex(const LPProblem& lp) : n_(lp.num_vars()), m_(lp.rows.size()) {
  const std::size_t total = n_ + m_;
  cost_.assign(total, 0.0);
  lo_.assign(total, 0.0);
  hi_.assign(total, 0.0);
  artificial_.assign(total, false);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  state_.assign(total, State::kLower);
  pos_.assign(total, -1);

  for (std::size_t j = 0; j < n_; ++j) {
    cost_[j] = lp.cost[j];
    lo_[j] = lp.lower[j];
    hi_[j] = lp.upper[j];
    if (!std::isfinite(lo_[j])) {
      lo_[j] = -kFreeBound;
      artificial_[j] = true;
    }
    if (!std::isfinite(hi_[j])) {
      hi_[j] = kFreeBound;
      artificial_[j] = true;
    }
    d_[j] = cost_[j];
    PlaceNonbasic(j);
  }

  row_terms_.reserve(m_);
  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < m_; ++r) {
    const auto& row = lp.rows[r];
    row_terms_.push_back(row.terms);
    double act_lo = 0.0;
    double act_hi = 0.0;
    for (const auto& [j, a] : row.terms) {
      trips.emplace_back(static_cast<int>(r), static_cast<int>(j), a);
      act_lo += std::min(a * lo_[j], a * hi_[j]);
      act_hi += std::max(a * lo_[j], a * hi_[j]);
    }
    const std::size_t k = n_ + r;
    lo_[k] = std::isfinite(row.lower) ? row.lower : act_lo;
    hi_[k] = std::isfinite(row.upper) ? row.upper : act_hi;
    state_[k] = State::kBasic;
    pos_[k] = static_cast<std::ptrdiff_t>(r);
    basis_.push_back(k);
  }
  a_.resize(static_cast<int>(m_), static_cast<int>(n_));
  a_.setFromTriplets(trips.begin(), trips.end());
  binv_ = -Eigen::MatrixXd::Identity(static_cast<int>(m_), static_cast<int>(m_));
}

void DualSimplex::PlaceNonbasic(std::size_t j) {
  if (d_[j] > kDualTol) {
    state_[j] = State::kLower;
  } else if (d_[j] < -kDualTol) {
    state_[j] = State::kUpper;
  } else if (state_[j] == State::kBasic) {
    state_[j] = State::kLower;
  }
  x_[j] = state_[j] == State::kLower ? lo_[j] : hi_[j];
}

void DualSimplex::SetBounds(std::size_t j, double lower, double upper) {
  if (!std::isfinite(lower)) lower = artificial_[j] ? -kFreeBound : lo_[j];
  if (!std::isfinite(upper)) upper = artificial_[j] ? kFreeBound : hi_[j];
  if (lo_[j] == lower && hi_[j] == upper) return;
  lo_[j] = lower;
  hi_[j] = upper;
  if (state_[j] != State::kBasic) {
    PlaceNonbasic(j);
    primal_dirty_ = true;
  }
}

std::size_t DualSimplex::AddRow(const std::vector<std::pair<std::size_t, double>>& terms, double lower,
                                double upper) {
  const std::size_t k = n_ + m_;
  double act_lo = 0.0;
  double act_hi = 0.0;
  double activity = 0.0;
  Eigen::VectorXd a_b = Eigen::VectorXd::Zero(static_cast<int>(m_));
  for (const auto& [j, a] : terms) {
    act_lo += std::min(a * lo_[j], a * hi_[j]);
    act_hi += std::max(a * lo_[j], a * hi_[j]);
    activity += a * x_[j];
    if (pos_[j] >= 0) a_b[pos_[j]] += a;
  }
  cost_.push_back(0.0);
  lo_.push_back(std::isfinite(lower) ? lower : act_lo);
  hi_.push_back(std::isfinite(upper) ? upper : act_hi);
  artificial_.push_back(false);
  x_.push_back(activity);
  d_.push_back(0.0);
  state_.push_back(State::kBasic);
  pos_.push_back(static_cast<std::ptrdiff_t>(m_));
  basis_.push_back(k);
  row_terms_.push_back(terms);

  const Eigen::RowVectorXd w = a_b.transpose() * binv_;
  const int m = static_cast<int>(m_);
  binv_.conservativeResize(m + 1, m + 1);
  binv_.col(m).setZero();
  binv_.row(m).head(m) = w;
  binv_(m, m) = -1.0;
  ++m_;

  std::vector<Eigen::Triplet<double>> trips;
  for (std::size_t r = 0; r < m_; ++r) {
    for (const auto& [j, a] : row_terms_[r]) trips.emplace_back(static_cast<int>(r), static_cast<int>(j), a);
  }
  a_.resize(static_cast<int>(m_), static_cast<int>(n_));
  a_.setFromTriplets(trips.begin(), trips.end());
  return m_ - 1;
}

Eigen::VectorXd DualSimplex::Column(std::size_t j) const {
  if (j >= n_) return -binv_.col(static_cast<int>(j - n_));
  Eigen::VectorXd aj = Eigen::VectorXd::Zero(static_cast<int>(m_));
  for (Eigen::SparseMatrix<double>::InnerIterator it(a_, static_cast<int>(j)); it; ++it) aj[it.row()] = it.value();
  return binv_ * aj;
}

void DualSimplex::RowAlpha(const Eigen::VectorXd& rho, std::vector<double>& alpha) const {
  const Eigen::VectorXd s = a_.transpose() * rho;
  alpha.resize(n_ + m_);
  for (std::size_t j = 0; j < n_; ++j) alpha[j] = s[static_cast<int>(j)];
  for (std::size_t k = 0; k < m_; ++k) alpha[n_ + k] = -rho[static_cast<int>(k)];
}

void DualSimplex::ComputePrimal() {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<int>(m_));
  for (std::size_t j = 0; j < n_; ++j) {
    if (state_[j] == State::kBasic || x_[j] == 0.0) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(a_, static_cast<int>(j)); it; ++it) {
      r[it.row()] += it.value() * x_[j];
    }
  }
  for (std::size_t k = 0; k < m_; ++k) {
    if (state_[n_ + k] != State::kBasic) r[static_cast<int>(k)] -= x_[n_ + k];
  }
  const Eigen::VectorXd xb = -(binv_ * r);
  for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = xb[static_cast<int>(i)];
  primal_dirty_ = false;
}

void DualSimplex::ComputeDuals() {
  Eigen::VectorXd cb(static_cast<int>(m_));
  for (std::size_t i = 0; i < m_; ++i) cb[static_cast<int>(i)] = cost_[basis_[i]];
  const Eigen::VectorXd y = binv_.transpose() * cb;
  const Eigen::VectorXd ay = a_.transpose() * y;
  for (std::size_t j = 0; j < n_; ++j) d_[j] = state_[j] == State::kBasic ? 0.0 : cost_[j] - ay[static_cast<int>(j)];
  for (std::size_t k = 0; k < m_; ++k) d_[n_ + k] = state_[n_ + k] == State::kBasic ? 0.0 : y[static_cast<int>(k)];
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (state_[j] == State::kBasic || lo_[j] == hi_[j]) continue;
    const State before = state_[j];
    if ((before == State::kLower && d_[j] < -kDualTol) || (before == State::kUpper && d_[j] > kDualTol)) {
      PlaceNonbasic(j);
      primal_dirty_ = true;
    }
  }
}

void DualSimplex::Refactor() {
  const int m = static_cast<int>(m_);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const std::size_t j = basis_[static_cast<std::size_t>(i)];
    if (j >= n_) {
      b(static_cast<int>(j - n_), i) = -1.0;
    } else {
      for (Eigen::SparseMatrix<double>::InnerIterator it(a_, static_cast<int>(j)); it; ++it) b(it.row(), i) = it.value();
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
  binv_ = lu.inverse();
  if (!binv_.allFinite() || lu.rcond() < 1e-13) {
    // Singular basis: fall back to the all-logical basis, which is dual
    // feasible once nonbasics sit at their cost-sign bounds.
    for (std::size_t j = 0; j < n_; ++j) {
      pos_[j] = -1;
      state_[j] = State::kLower;
      d_[j] = cost_[j];
      PlaceNonbasic(j);
    }
    for (std::size_t k = 0; k < m_; ++k) {
      state_[n_ + k] = State::kBasic;
      pos_[n_ + k] = static_cast<std::ptrdiff_t>(k);
      basis_[k] = n_ + k;
    }
    binv_ = -Eigen::MatrixXd::Identity(m, m);
  }
  since_refactor_ = 0;
  ComputeDuals();
  ComputePrimal();
}

double DualSimplex::Residual() const {
  double worst = 0.0;
  for (std::size_t r = 0; r < m_; ++r) {
    double s = 0.0;
    for (const auto& [j, a] : row_terms_[r]) s += a * x_[j];
    worst = std::max(worst, std::abs(s - x_[n_ + r]) / (1.0 + std::abs(s)));
  }
  return worst;
}

LPStatus DualSimplex::Solve(std::size_t max_iterations) {
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(20000, 50 * (n_ + m_));
  for (std::size_t j = 0; j < n_ + m_; ++j) {
    if (lo_[j] > hi_[j] + kPrimalTol * std::max(1.0, std::abs(hi_[j]))) return LPStatus::kInfeasible;
  }
  if (primal_dirty_) ComputePrimal();

  std::vector<double> alpha;
  std::vector<std::pair<double, std::size_t>> candidates;
  std::size_t degenerate = 0;
  bool retried = false;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    if (since_refactor_ >= kRefactorEvery || (since_refactor_ > 0 && since_refactor_ % 20 == 0 && Residual() > 1e-9)) {
      Refactor();
    }
    const bool bland = degenerate > kDegenerateLimit;

    // Leaving row: dual steepest edge, exact weights from B^-1.
    std::ptrdiff_t p = -1;
    double best = 0.0;
    Eigen::VectorXd weights;
    if (!bland) weights = binv_.rowwise().squaredNorm();
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t j = basis_[i];
      const double v = viol(x_[j], lo_[j], hi_[j]);
      if (v <= 0.0) continue;
      if (bland) {
        if (p < 0 || j < basis_[static_cast<std::size_t>(p)]) p = static_cast<std::ptrdiff_t>(i);
        continue;
      }
      const double score = v * v / std::max(weights[static_cast<int>(i)], 1e-12);
      if (score > best) {
        best = score;
        p = static_cast<std::ptrdiff_t>(i);
      }
    }
    if (p < 0) {
      for (std::size_t j = 0; j < n_; ++j) {
        if (artificial_[j] && std::abs(x_[j]) >= kFreeBound * (1.0 - 1e-9)) return LPStatus::kUnbounded;
      }
      return LPStatus::kOptimal;
    }

    const std::size_t leave = basis_[static_cast<std::size_t>(p)];
    const bool to_lower = x_[leave] < lo_[leave];
    const double target = to_lower ? lo_[leave] : hi_[leave];
    const double s = to_lower ? -1.0 : 1.0;
    const Eigen::VectorXd rho = binv_.row(p).transpose();
    RowAlpha(rho, alpha);

    auto eligible = [&](std::size_t j) {
      if (state_[j] == State::kBasic || lo_[j] == hi_[j]) return false;
      const double a = s * alpha[j];
      if (std::abs(alpha[j]) <= kPivotTol) return false;
      return state_[j] == State::kLower ? a > 0.0 : a < 0.0;
    };
    auto slack = [&](std::size_t j) {
      return state_[j] == State::kLower ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
    };
    std::ptrdiff_t q = -1;
    std::vector<std::size_t> flips;
    if (bland) {
      double best_ratio = kInfinity;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (!eligible(j)) continue;
        const double r = slack(j) / std::abs(alpha[j]);
        if (r < best_ratio - 1e-12) {
          best_ratio = r;
          q = static_cast<std::ptrdiff_t>(j);
        }
      }
    } else {
      // Bound-flipping ratio test: pass breakpoints of boxed variables while
      // the leaving row stays infeasible, then a Harris pass on the rest.
      candidates.clear();
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (eligible(j)) candidates.emplace_back(slack(j) / std::abs(alpha[j]), j);
      }
      std::sort(candidates.begin(), candidates.end());
      double slope = std::abs(x_[leave] - target);
      std::size_t k = 0;
      while (k + 1 < candidates.size()) {
        const std::size_t j = candidates[k].second;
        const double next = slope - std::abs(alpha[j]) * (hi_[j] - lo_[j]);
        if (next <= kPrimalTol) break;
        flips.push_back(j);
        slope = next;
        ++k;
      }
      if (k < candidates.size()) {
        double bound = kInfinity;
        for (std::size_t c = k; c < candidates.size(); ++c) {
          const std::size_t j = candidates[c].second;
          bound = std::min(bound, (slack(j) + kDualTol) / std::abs(alpha[j]));
        }
        double best_pivot = 0.0;
        for (std::size_t c = k; c < candidates.size() && candidates[c].first <= bound; ++c) {
          const std::size_t j = candidates[c].second;
          if (std::abs(alpha[j]) > best_pivot) {
            best_pivot = std::abs(alpha[j]);
            q = static_cast<std::ptrdiff_t>(j);
          }
        }
      }
    }
    if (q < 0) {
      if (since_refactor_ > 0 && !retried) {
        retried = true;
        Refactor();
        continue;
      }
      return LPStatus::kInfeasible;
    }
    retried = false;

    const std::size_t enter = static_cast<std::size_t>(q);
    const Eigen::VectorXd col = Column(enter);
    const double apq = col[p];
    if (std::abs(apq - alpha[enter]) > 1e-7 * (1.0 + std::abs(apq)) && since_refactor_ > 0) {
      Refactor();
      continue;
    }

    if (!flips.empty()) {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<int>(m_));
      for (std::size_t j : flips) {
        const double dx = state_[j] == State::kLower ? hi_[j] - lo_[j] : lo_[j] - hi_[j];
        state_[j] = state_[j] == State::kLower ? State::kUpper : State::kLower;
        x_[j] = state_[j] == State::kLower ? lo_[j] : hi_[j];
        if (j >= n_) {
          r[static_cast<int>(j - n_)] -= dx;
        } else {
          for (Eigen::SparseMatrix<double>::InnerIterator it(a_, static_cast<int>(j)); it; ++it) {
            r[it.row()] += it.value() * dx;
          }
        }
      }
      const Eigen::VectorXd shift = binv_ * r;
      for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= shift[static_cast<int>(i)];
    }

    const double dq = state_[enter] == State::kLower ? slack(enter) : -slack(enter);
    const double theta = dq / apq;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (state_[j] != State::kBasic) d_[j] -= theta * alpha[j];
    }
    d_[enter] = 0.0;
    d_[leave] = -theta;
    degenerate = std::abs(theta) <= 1e-12 ? degenerate + 1 : 0;

    const double delta = (x_[leave] - target) / apq;
    for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] -= delta * col[static_cast<int>(i)];
    x_[enter] += delta;
    x_[leave] = target;

    state_[leave] = to_lower ? State::kLower : State::kUpper;
    pos_[leave] = -1;
    state_[enter] = State::kBasic;
    pos_[enter] = p;
    basis_[static_cast<std::size_t>(p)] = enter;

    const Eigen::RowVectorXd rowp = binv_.row(p) / apq;
    binv_.noalias() -= col * rowp;
    binv_.row(p) = rowp;

    ++iterations_;
    ++since_refactor_;
  }
  return LPStatus::kIterationLimit;
}

double DualSimplex::Objective() const {
  double total = 0.0;
  for (std::size_t j = 0; j < n_; ++j) total += cost_[j] * x_[j];
  return total;
}

std::vector<double> DualSimplex::Primal() const { return {x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_)}; }

LPSolution simplex_solve(const LPProblem& lp) {
  DualSimplex solver(lp);
  LPSolution out;
  out.status = solver.Solve();
  out.x = solver.Primal();
  out.objective = solver.Objective();
  out.basis = solver.Basis();
  out.iterations = solver.Iterations();
  return out;
}

}  // namespace slim
