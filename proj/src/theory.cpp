#include "slim/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slim {
namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a * a;
  return std::sqrt(s);
}

// Odometer over {lo..hi}^p; calls f on each vector.
template <typename F>
void for_each_vector(std::size_t p, int lo, int hi, F&& f) {
  std::vector<int> z(p, lo);
  while (true) {
    f(z);
    std::size_t j = 0;
    while (j < p && z[j] == hi) z[j++] = lo;
    if (j == p) return;
    ++z[j];
  }
}

void check_budget(double size, const char* what) {
  if (size > kMaxEnumeration) {
    throw InputError(std::string(what) + ": enumeration of " + std::to_string(size) + " vectors exceeds the budget");
  }
}

}  // namespace

double MarginProfile::gamma(std::size_t k) const {
  if (k == 0 || k > order.size()) throw InputError("margin order out of range");
  return margins[order[k - 1]];
}

double MarginProfile::x_k(std::size_t k) const {
  const double g = gamma(k);
  double out = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (margins[i] >= g) out = std::max(out, norms[i]);
  }
  return out;
}

MarginProfile margin_profile(const std::vector<std::vector<double>>& x, const std::vector<double>& rho) {
  const double r = norm2(rho);
  if (!(r > 0.0)) throw InputError("baseline coefficients are zero");
  if (x.empty()) throw InputError("no examples");
  MarginProfile out;
  out.rho = rho;
  for (const auto& row : x) {
    if (row.size() != rho.size()) throw InputError("example and coefficient dimensions differ");
    double s = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) s += rho[j] * row[j];
    out.margins.push_back(std::abs(s) / r);
    out.norms.push_back(norm2(row));
    out.x_max = std::max(out.x_max, out.norms.back());
  }
  out.order.resize(x.size());
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return out.margins[a] < out.margins[b]; });
  return out;
}

MarginProfile margin_profile(const Dataset& data, const std::vector<double>& rho, bool include_intercept) {
  const std::size_t first = include_intercept ? 0 : 1;
  std::vector<std::vector<double>> x;
  for (std::size_t i = 0; i < data.num_examples(); ++i) {
    const auto row = data.row(i);
    x.emplace_back(row.begin() + static_cast<std::ptrdiff_t>(first), row.end());
  }
  return margin_profile(x, rho);
}

double min_resolution(const MarginProfile& profile, std::size_t k) {
  const double g = profile.gamma(k);
  if (!(g > 0.0)) throw InputError("margin degenerate");
  return profile.x_k(k) * std::sqrt(static_cast<double>(profile.dimension())) / (2.0 * g);
}

int smallest_admissible_lambda(double bound) {
  if (!(bound < 2e9)) throw InputError("resolution bound too large");
  return std::max(1, static_cast<int>(std::floor(bound)) + 1);
}

std::vector<int> round_at_resolution(const std::vector<double>& rho, int lambda_cap) {
  if (lambda_cap < 1) throw InputError("resolution must be at least 1");
  const double r = norm2(rho);
  if (!(r > 0.0)) throw InputError("baseline coefficients are zero");
  std::vector<int> out;
  for (double v : rho) {
    const double t = lambda_cap * v / r;
    const double a = std::abs(t);
    double k = std::floor(a);
    if (a - k > 0.5) k += 1.0;
    out.push_back(static_cast<int>(std::copysign(std::min(k, static_cast<double>(lambda_cap)), t)));
  }
  return out;
}

std::size_t zero_one_errors(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                            const std::vector<double>& coef) {
  std::size_t errors = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < coef.size(); ++j) s += coef[j] * x[i][j];
    if (y[i] * s <= 0.0) ++errors;
  }
  return errors;
}

double log_big(const BigInt& value) {
  if (value <= 0) throw InputError("logarithm of a non-positive count");
  const std::size_t bits = boost::multiprecision::msb(value) + 1;
  if (bits <= 60) return std::log(value.convert_to<double>());
  const std::size_t shift = bits - 60;
  const BigInt top = value >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double occam_bound(const BigInt& hypothesis_count, double delta, std::size_t n) {
  if (hypothesis_count < 1) throw InputError("hypothesis count must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must be in (0, 1)");
  if (n == 0) throw InputError("N must be positive");
  return std::sqrt((log_big(hypothesis_count) - std::log(delta)) / (2.0 * static_cast<double>(n)));
}

BigInt full_count(std::size_t p, int lambda_cap) {
  BigInt out = 1;
  for (std::size_t j = 0; j < p; ++j) out *= 2 * lambda_cap + 1;
  return out;
}

BigInt sparse_hypothesis_count(std::size_t p, int lambda_cap, double c0, std::optional<int> intercept_cap) {
  if (!(c0 > 0.0)) throw InputError("C0 must be positive");
  if (lambda_cap < 0) throw InputError("coefficient bound must be >= 0");
  const double inv = 1.0 / c0;
  const double k_max = std::floor(inv * (1.0 + 1e-12));
  const std::size_t top = k_max >= static_cast<double>(p) ? p : static_cast<std::size_t>(k_max);
  BigInt total = 0;
  BigInt binom = 1;  // C(p, k)
  BigInt power = 1;  // (2 Lambda)^k
  for (std::size_t k = 0; k <= top; ++k) {
    total += binom * power;
    binom = binom * (p - k) / (k + 1);
    power *= 2 * lambda_cap;
  }
  if (intercept_cap) total *= 2 * *intercept_cap + 1;
  return total;
}

BigInt coprime_count(std::size_t p, int lambda_cap) {
  if (lambda_cap < 0) throw InputError("coefficient bound must be >= 0");
  check_budget(static_cast<double>(p) * std::pow(2.0 * lambda_cap + 1.0, static_cast<double>(p)), "coprime_count");
  BigInt count = 0;
  for_each_vector(p, -lambda_cap, lambda_cap, [&](const std::vector<int>& z) {
    int g = 0;
    for (int v : z) g = std::gcd(g, std::abs(v));
    if (g == 1) ++count;
  });
  return count;
}

double coprime_density(std::size_t p, int lambda_cap) {
  return coprime_count(p, lambda_cap).convert_to<double>() / full_count(p, lambda_cap).convert_to<double>();
}

BigInt farey_count(std::size_t p, int level) {
  if (level < 1) throw InputError("Farey level must be at least 1");
  double size = 0.0;
  for (int q = 1; q <= level; ++q) size += std::pow(static_cast<double>(q), static_cast<double>(p));
  check_budget(size * static_cast<double>(std::max<std::size_t>(p, 1)), "farey_count");
  BigInt count = 0;
  for (int q = 1; q <= level; ++q) {
    for_each_vector(p, 0, q - 1, [&](const std::vector<int>& z) {
      int g = q;
      for (int v : z) g = std::gcd(g, v);
      if (g == 1) ++count;
    });
  }
  return count;
}

}  // namespace slim
