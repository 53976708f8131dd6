#ifndef SLIM_THEORY_HPP_
#define SLIM_THEORY_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "slim/data.hpp"

namespace slim {

using BigInt = boost::multiprecision::cpp_int;

// Margins |rho^T x_i| / ||rho||_2 and magnitudes ||x_i||_2 of a baseline
// linear classifier. Coordinates are whatever the caller passes: the
// intercept is an ordinary coordinate when included.
struct MarginProfile {
  std::vector<double> rho;
  std::vector<double> margins;
  std::vector<double> norms;
  std::vector<std::size_t> order;  // examples by increasing margin
  double x_max = 0.0;

  std::size_t dimension() const { return rho.size(); }
  // k-th smallest margin, k >= 1.
  double gamma(std::size_t k = 1) const;
  // Largest magnitude among examples whose margin is at least gamma(k);
  // only the examples strictly below gamma(k) (fewer than k) are dropped.
  double x_k(std::size_t k = 1) const;
};

MarginProfile margin_profile(const std::vector<std::vector<double>>& x, const std::vector<double>& rho);
// Rows of `data` without the intercept column unless include_intercept, in
// which case rho[0] multiplies the intercept.
MarginProfile margin_profile(const Dataset& data, const std::vector<double>& rho, bool include_intercept = false);

// X_(k) sqrt(P) / (2 gamma_(k)); k = 1 gives X_max sqrt(P) / (2 gamma_min).
// Any integer strictly above it works. Throws InputError "margin degenerate"
// when gamma_(k) is 0.
double min_resolution(const MarginProfile& profile, std::size_t k = 1);
// Smallest integer strictly greater than `bound`.
int smallest_admissible_lambda(double bound);

// lambda_j = Lambda rho_j / ||rho||_2 rounded to the nearest integer, halves
// toward zero.
std::vector<int> round_at_resolution(const std::vector<double>& rho, int lambda_cap);

// Number of examples with y_i coef^T x_i <= 0.
std::size_t zero_one_errors(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                            const std::vector<double>& coef);

// Natural log of a positive big integer.
double log_big(const BigInt& value);

// sqrt((ln |H| - ln delta) / (2N)).
double occam_bound(const BigInt& hypothesis_count, double delta, std::size_t n);

// (2 Lambda + 1)^P.
BigInt full_count(std::size_t p, int lambda_cap);

// Vectors in {-Lambda..Lambda}^P with at most floor(1/C0) nonzeros. With an
// intercept cap the count is multiplied by its 2 cap + 1 values.
BigInt sparse_hypothesis_count(std::size_t p, int lambda_cap, double c0,
                               std::optional<int> intercept_cap = std::nullopt);

inline constexpr double kMaxEnumeration = 5e7;

// Vectors z in {-Lambda..Lambda}^P with gcd(|z|) = 1, by enumeration.
BigInt coprime_count(std::size_t p, int lambda_cap);
double coprime_density(std::size_t p, int lambda_cap);

// Points lambda/q in [0,1)^P with gcd(lambda, q) = 1 and 1 <= q <= level.
BigInt farey_count(std::size_t p, int level);

}  // namespace slim

#endif  // SLIM_THEORY_HPP_
