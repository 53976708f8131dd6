#ifndef SLIM_FORMULATE_HPP_
#define SLIM_FORMULATE_HPP_

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "slim/data.hpp"
#include "slim/scoring.hpp"

namespace slim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

enum class VarKind { kInteger, kBinary, kContinuous };

enum class VarRole {
  kCoefficient,  // lambda_j
  kLoss,         // psi_i
  kPenalty,      // Phi_j
  kL0,           // alpha_j
  kL1,           // beta_j
  kSelector,     // u_{j,k,r}
  kFeatureUse,   // nu_g
  kExtraRules,   // tau_g
  kSignChoice,   // delta_g
};

struct Variable {
  std::string name;
  VarKind kind = VarKind::kContinuous;
  VarRole role = VarRole::kCoefficient;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t index = 0;  // column j, example i or rule group g, depending on role
};

// lower <= sum(terms) <= upper.
struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  double lower = -kInf;
  double upper = kInf;
  std::string name;
  std::string family;  // "loss", "penalty", "l0", "l1", "max_fpr", ...
};

// ---- operational constraints ----------------------------------------------
// Feature indices are data columns 1..P.

struct MaxFPR {
  double gamma_fpr = 0.0;
};
// At least `tpr` of positives classified correctly.
struct MinTPR {
  double tpr = 0.0;
};
struct MaxModelSize {
  std::size_t theta = 0;
};
struct Sign {
  std::size_t feature = 0;
  int sign = 1;
};
// Using any antecedent forces the consequent: sum alpha_a <= |A| alpha_c.
struct IfThen {
  std::vector<std::size_t> antecedents;
  std::size_t consequent = 0;
};
// The leaf may only be used if every node is used.
struct Hierarchy {
  std::size_t leaf = 0;
  std::vector<std::size_t> nodes;
};
struct PerFeaturePenalty {
  std::size_t feature = 0;
  double c0 = 0.0;
};
struct PinZero {
  std::size_t feature = 0;
};

using ConstraintSpec =
    std::variant<MaxFPR, MinTPR, MaxModelSize, Sign, IfThen, Hierarchy, PerFeaturePenalty, PinZero>;

std::string constraint_family(const ConstraintSpec& spec);

// Parses a JSON array such as
//   [{"max_fpr": 0.2}, {"max_size": 5}, {"sign": "age", "direction": "+"},
//    {"if_then": ["heart_attack", "hypertension"], "then": "stroke"}, ...]
// resolving feature names against `data`.
std::vector<ConstraintSpec> parse_constraints(const std::string& json_text, const Dataset& data);

// ---- instance ---------------------------------------------------------------

enum class Family { kSlim, kPilm, kMofN, kTilm };

struct InterpretabilitySet {
  std::vector<int> values;
  double cost = 0.0;
};

class IPInstance {
 public:
  Family family = Family::kSlim;
  std::vector<Variable> vars;
  std::vector<Row> rows;
  std::vector<double> objective;
  double objective_offset = 0.0;

  std::shared_ptr<const Dataset> data;
  CoefficientSet coeffs;  // after Sign/PinZero restrictions
  ClassWeights weights;
  double gamma = 0.1;
  double normalization = 1.0;  // N used in W/N
  std::vector<double> big_m;
  std::vector<double> c0;  // per column, entry 0 unused
  double eps = 0.0;
  std::vector<ConstraintSpec> constraints;

  // Variable indices. lambda[j] multiplies data column j.
  std::vector<std::size_t> lambda;
  std::vector<std::size_t> psi;
  std::vector<std::size_t> phi, alpha, beta;  // per column, kNone where absent
  // PILM: selectors[j] lists (variable, value, cost).
  struct Selector {
    std::size_t var;
    int value;
    double cost;
  };
  std::vector<std::vector<Selector>> selectors;
  // TILM: rule groups of data columns and per-group auxiliaries.
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> nu, tau, delta;
  int r_max = 0;

  std::size_t num_vars() const { return vars.size(); }
  std::size_t num_rows() const { return rows.size(); }
  std::size_t add_var(Variable v, double cost = 0.0);
  void add_row(Row r);
};

// M_i = max over L of (gamma - y_i lambda^T x_i).
std::vector<double> big_m_loss(const Dataset& data, const CoefficientSet& coeffs, double gamma);

// 0.1; warns on stderr when the features are not binary.
double default_gamma(const Dataset& data, bool warn = true);
// 0.5 * min(1/N, C0) / sum_{j>=1} Lambda_j.
double default_epsilon(double c0, std::size_t n, const CoefficientSet& coeffs);
// C0 + M/N.
double missing_data_penalty(double c0, std::size_t m_missing, std::size_t n);

struct SlimOptions {
  double normalization = 0.0;  // 0: use N of the dataset
  double objective_offset = 0.0;
  bool warn = true;
  // Per-column l0 penalties (entry 0 unused) replacing the ones derived from
  // c0, missing counts and PerFeaturePenalty. Empty: derive them.
  std::vector<double> column_c0;
};

IPInstance build_slim(const Dataset& data, double c0, double eps, double gamma,
                      const CoefficientSet& coeffs, const ClassWeights& weights,
                      const std::vector<ConstraintSpec>& constraints, const SlimOptions& options = {});

// Appends sum_{i in I-} psi_i <= floor(gamma_fpr * N-).
void add_max_fpr(IPInstance& instance, double gamma_fpr);

// `sets` must be disjoint with strictly increasing costs; the intercept may
// take any value in [-intercept_max, intercept_max] at no cost.
IPInstance build_pilm(const Dataset& data, const std::vector<InterpretabilitySet>& sets,
                      int intercept_max, double gamma, const ClassWeights& weights);

IPInstance build_mofn(const Dataset& data, double c0, double gamma, const ClassWeights& weights);

// `groups` lists the data columns (1-based) of each source feature.
IPInstance build_tilm(const Dataset& data, const std::vector<std::vector<std::size_t>>& groups,
                      double c_f, double c_t, double eps, int r_max, int lambda_max,
                      int intercept_max, double gamma, const ClassWeights& weights);

// ---- assignments --------------------------------------------------------------

// Every variable set from integer coefficients by definition (psi_i = 1 iff
// y_i lambda^T x_i < gamma, alpha_j = [lambda_j != 0], ...). nullopt when lambda
// is outside L or the completed point violates a row.
std::optional<std::vector<double>> complete(const IPInstance& instance, const std::vector<int>& lambda);

// Objective excluding the loss variables; does not depend on lambda_0.
// nullopt when the non-loss rows cannot be satisfied.
std::optional<double> penalty_value(const IPInstance& instance, const std::vector<int>& lambda);

double evaluate(const IPInstance& instance, const std::vector<double>& x);
bool feasible(const IPInstance& instance, const std::vector<double>& x, double tol = 1e-7);
std::vector<int> extract_lambda(const IPInstance& instance, const std::vector<double>& x);
ScoringSystem decode(const IPInstance& instance, const std::vector<int>& lambda);

struct MofNTable {
  int m = 1;
  std::vector<std::string> rules;
};
MofNTable decode_mofn(const IPInstance& instance, const std::vector<int>& lambda);
std::string render_mofn(const MofNTable& table, const std::string& outcome = "Y = +1");

// CPLEX LP text format.
void write_lp(const IPInstance& instance, std::ostream& out);

}  // namespace slim

#endif  // SLIM_FORMULATE_HPP_
