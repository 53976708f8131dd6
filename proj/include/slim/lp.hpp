#ifndef SLIM_LP_HPP_
#define SLIM_LP_HPP_

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace slim {

// min cost^T x  s.t.  row.lower <= row^T x <= row.upper,  lower <= x <= upper.
struct LPProblem {
  struct Row {
    std::vector<std::pair<std::size_t, double>> terms;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
  };
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  std::size_t num_vars() const { return cost.size(); }
};

enum class LPStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LPStatus status);

struct LPSolution {
  LPStatus status = LPStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<std::size_t> basis;  // basic variable per row; indices >= n are row logicals
  std::size_t iterations = 0;
};

// Bounded dual simplex on [A | -I] (x, s) = 0 with s the row activities.
// Every variable is boxed: row logicals take the row range intersected with the
// activity range implied by the variable bounds, and free structurals get an
// artificial box of +-kFreeBound (ending there is reported as unbounded). The
// all-logical starting basis is dual feasible once nonbasic structurals sit at
// the bound matching the sign of their cost, so no phase 1 is needed.
//
// After Solve() the basis is kept: SetBounds() and AddRow() preserve dual
// feasibility, so re-solving is a warm start.
class DualSimplex {
 public:
  static constexpr double kFreeBound = 1e7;

  explicit DualSimplex(const LPProblem& lp);

  std::size_t num_vars() const { return n_; }
  std::size_t num_rows() const { return m_; }

  // Bounds should stay within the original ones: implied logical boxes were
  // derived from them.
  void SetBounds(std::size_t j, double lower, double upper);
  double Lower(std::size_t j) const { return lo_[j]; }
  double Upper(std::size_t j) const { return hi_[j]; }

  // Appends lower <= terms^T x <= upper; returns the new row index.
  std::size_t AddRow(const std::vector<std::pair<std::size_t, double>>& terms, double lower, double upper);

  LPStatus Solve(std::size_t max_iterations = 0);

  double Objective() const;
  std::vector<double> Primal() const;
  std::vector<std::size_t> Basis() const { return basis_; }
  std::size_t Iterations() const { return iterations_; }

 private:
  enum class State : unsigned char { kBasic, kLower, kUpper };

  void Refactor();
  void ComputePrimal();
  void ComputeDuals();
  double Residual() const;
  // alpha_r,j for all nonbasic j, given rho = row r of B^-1.
  void RowAlpha(const Eigen::VectorXd& rho, std::vector<double>& alpha) const;
  Eigen::VectorXd Column(std::size_t j) const;
  void PlaceNonbasic(std::size_t j);

  std::size_t n_ = 0;  // structurals
  std::size_t m_ = 0;  // rows
  Eigen::SparseMatrix<double> a_;  // m x n, column-major
  std::vector<std::vector<std::pair<std::size_t, double>>> row_terms_;
  std::vector<double> cost_;  // n + m
  std::vector<double> lo_, hi_;
  std::vector<bool> artificial_;
  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<State> state_;
  std::vector<std::size_t> basis_;  // m entries
  std::vector<std::ptrdiff_t> pos_;  // var -> basis row, -1 when nonbasic
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> binv_;
  bool primal_dirty_ = true;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
};

LPSolution simplex_solve(const LPProblem& lp);

}  // namespace slim

#endif  // SLIM_LP_HPP_
