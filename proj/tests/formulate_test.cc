#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "slim/formulate.hpp"
#include "slim/milp.hpp"
#include "test_util.hpp"

namespace slim {
namespace {

using testing::RandomDataset;

std::size_t CountFamily(const IPInstance& inst, const std::string& family) {
  return std::count_if(inst.rows.begin(), inst.rows.end(), [&](const Row& r) { return r.family == family; });
}

const Row& FindRow(const IPInstance& inst, const std::string& family) {
  for (const auto& r : inst.rows) {
    if (r.family == family) return r;
  }
  throw std::runtime_error("no row of family " + family);
}

// Every lambda of a small coefficient box, in odometer order.
std::vector<std::vector<int>> AllLambdas(const CoefficientSet& c) {
  std::vector<std::vector<int>> out;
  std::vector<int> lam(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) lam[j] = c.lower(j);
  while (true) {
    out.push_back(lam);
    std::size_t j = 0;
    while (j < c.size() && lam[j] == c.upper(j)) {
      lam[j] = c.lower(j);
      ++j;
    }
    if (j == c.size()) return out;
    ++lam[j];
  }
}

TEST(BigM, HandExamples) {
  const Dataset d = Dataset::FromRows({{1, 0}, {0, 0}}, {1, -1}, {"a", "b"});
  const auto m = big_m_loss(d, CoefficientSet::Uniform(2, 2, 2), 0.1);
  EXPECT_NEAR(m[0], 4.1, 1e-12);
  const auto m2 = big_m_loss(d, CoefficientSet::Uniform(2, 2, 100), 0.1);
  EXPECT_NEAR(m2[1], 100.1, 1e-12);
  const Dataset flipped = Dataset::FromRows({{1, 0}, {1, 0}}, {1, -1}, {"a", "b"});
  const auto m3 = big_m_loss(flipped, CoefficientSet::Uniform(2, 3, 5), 0.1);
  EXPECT_EQ(m3[0], m3[1]);
}

TEST(BigM, MatchesBruteForce) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<int> cap(1, 3);
  std::uniform_int_distribution<int> pp(1, 3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t p = pp(rng);
    CoefficientSet c = CoefficientSet::Uniform(p, cap(rng), cap(rng));
    if (t % 3 == 0) c.set_range(1, 0, c.upper(1));
    if (t % 4 == 0) c.set_range(p, -1, 2);
    const Dataset d = RandomDataset(rng, 1, p, -3, 3);
    const double gamma = 0.1;
    double brute = -kInf;
    for (const auto& lam : AllLambdas(c)) {
      double s = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) s += lam[j] * d.x(0, j);
      brute = std::max(brute, gamma - d.y(0) * s);
    }
    EXPECT_NEAR(big_m_loss(d, c, gamma)[0], brute, 1e-12) << "case " << t;
  }
}

TEST(Defaults, GammaAndEpsilon) {
  const Dataset bin = Dataset::FromRows({{1}, {0}}, {1, -1}, {"a"});
  EXPECT_EQ(default_gamma(bin, false), 0.1);
  const Dataset real = Dataset::FromRows({{1.5}, {0}}, {1, -1}, {"a"});
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(default_gamma(real), 0.1);
  EXPECT_NE(::testing::internal::GetCapturedStderr().find("warning"), std::string::npos);

  EXPECT_NEAR(default_epsilon(0.01, 100, CoefficientSet::Uniform(5, 10, 100)), 1e-4, 1e-18);
  EXPECT_NEAR(default_epsilon(0.5, 100, CoefficientSet::Uniform(5, 10, 100)), 0.5 * 0.01 / 50, 1e-18);
  EXPECT_NEAR(default_epsilon(1.0, 2, CoefficientSet::Uniform(1, 1, 1)), 0.25, 1e-15);
}

TEST(Defaults, MissingDataPenalty) {
  EXPECT_EQ(missing_data_penalty(0.01, 0, 200), 0.01);
  EXPECT_NEAR(missing_data_penalty(0.01, 50, 200), 0.26, 1e-15);
  EXPECT_GE(missing_data_penalty(0.01, 200, 200), 1.0);
}

TEST(BuildSlim, CoreRowCount) {
  const Dataset d = Dataset::FromRows({{1, 0}, {0, 1}, {1, 1}}, {1, -1, 1}, {"a", "b"});
  const IPInstance inst = build_slim(d, 0.01, 1e-4, 0.1, CoefficientSet::Uniform(2, 5, 10), {}, {}, {.warn = false});
  EXPECT_EQ(inst.num_rows(), 3u + 2u + 4u + 4u);
  EXPECT_EQ(CountFamily(inst, "loss"), 3u);
  EXPECT_EQ(CountFamily(inst, "penalty"), 2u);
  EXPECT_EQ(CountFamily(inst, "l0"), 4u);
  EXPECT_EQ(CountFamily(inst, "l1"), 4u);
  EXPECT_EQ(inst.psi.size(), 3u);
  for (auto k : inst.psi) {
    EXPECT_EQ(inst.vars[k].kind, VarKind::kBinary);
    EXPECT_NEAR(inst.objective[k], 1.0 / 3.0, 1e-15);
  }
  for (std::size_t j = 0; j <= 2; ++j) {
    EXPECT_EQ(inst.vars[inst.lambda[j]].lower, -(j == 0 ? 10 : 5));
    EXPECT_EQ(inst.vars[inst.lambda[j]].upper, j == 0 ? 10 : 5);
  }
  EXPECT_EQ(inst.alpha[0], kNone);
  EXPECT_EQ(inst.objective[inst.alpha[1]], 0.01);
  EXPECT_EQ(inst.objective[inst.beta[2]], 1e-4);
}

TEST(BuildSlim, OperationalRows) {
  const Dataset d = Dataset::FromRows({{1, 0, 1}, {0, 1, 0}}, {1, -1}, {"heart_attack", "hypertension", "stroke"});
  const auto cons = parse_constraints(
      R"([{"max_size": 2}, {"if_then": ["heart_attack", "hypertension"], "then": "stroke"}])", d);
  const IPInstance inst = build_slim(d, 0.01, 1e-4, 0.1, CoefficientSet::Uniform(3, 5, 10), {}, cons, {.warn = false});
  const Row& size = FindRow(inst, "max_size");
  EXPECT_EQ(size.upper, 2.0);
  EXPECT_EQ(size.terms.size(), 3u);
  const Row& ift = FindRow(inst, "if_then");
  EXPECT_EQ(ift.upper, 0.0);
  for (const auto& [k, a] : ift.terms) {
    if (k == inst.alpha[3]) {
      EXPECT_EQ(a, -2.0);
    } else {
      EXPECT_TRUE(k == inst.alpha[1] || k == inst.alpha[2]);
      EXPECT_EQ(a, 1.0);
    }
  }
}

TEST(BuildSlim, RejectsIncompatibleSign) {
  const Dataset d = Dataset::FromRows({{1}, {0}}, {1, -1}, {"a"});
  CoefficientSet c = CoefficientSet::Uniform(1, 3, 3);
  c.set_range(1, -3, 0);
  EXPECT_THROW(build_slim(d, 0.01, 0, 0.1, c, {}, {Sign{1, 1}}, {.warn = false}), InputError);
  EXPECT_THROW(parse_constraints(R"([{"sign": "nope", "direction": "+"}])", d), InputError);
  EXPECT_THROW(parse_constraints(R"([{"max_fpr": 1.5}])", d), InputError);
}

TEST(MaxFpr, RightHandSide) {
  std::vector<std::vector<double>> rows(100, std::vector<double>(1, 0.0));
  std::vector<int> labels(100, -1);
  labels[0] = 1;
  const Dataset d = Dataset::FromRows(rows, labels, {"a"});
  IPInstance inst = build_slim(d, 0.01, 0, 0.1, CoefficientSet::Uniform(1, 1, 1), {}, {}, {.warn = false});
  add_max_fpr(inst, 0.2);
  EXPECT_EQ(FindRow(inst, "max_fpr").upper, 19.0);  // floor(0.2 * 99)

  const Dataset two = Dataset::FromRows({{0}, {1}, {0}}, {-1, -1, 1}, {"a"});
  IPInstance small = build_slim(two, 0.01, 0, 0.1, CoefficientSet::Uniform(1, 1, 1), {}, {}, {.warn = false});
  add_max_fpr(small, 0.999);
  EXPECT_EQ(FindRow(small, "max_fpr").upper, 1.0);

  const Dataset hundred = [] {
    std::vector<std::vector<double>> r(101, std::vector<double>(1, 0.0));
    std::vector<int> l(101, -1);
    l[100] = 1;
    return Dataset::FromRows(r, l, {"a"});
  }();
  IPInstance h = build_slim(hundred, 0.01, 0, 0.1, CoefficientSet::Uniform(1, 1, 1), {}, {}, {.warn = false});
  add_max_fpr(h, 0.2);
  EXPECT_EQ(FindRow(h, "max_fpr").upper, 20.0);
}

TEST(MaxFpr, EveryFeasiblePointRespectsCap) {
  std::mt19937 rng(23);
  for (int t = 0; t < 30; ++t) {
    const Dataset d = RandomDataset(rng, 10, 2, -1, 1);
    const double gamma_fpr = 0.1 * (1 + t % 5);
    const std::size_t cap = static_cast<std::size_t>(gamma_fpr * d.n_neg() + 1e-9);
    const CoefficientSet c = CoefficientSet::Uniform(2, 2, 2);
    const IPInstance inst = build_slim(d, 0.05, 0, 0.1, c, {}, {MaxFPR{gamma_fpr}}, {.warn = false});
    for (const auto& lam : AllLambdas(c)) {
      const auto x = complete(inst, lam);
      if (!x) continue;
      std::size_t fp = 0;
      for (auto i : d.negative_indices()) fp += (*x)[inst.psi[i]] > 0.5;
      EXPECT_LE(fp, cap);
    }
  }
}

TEST(Instance, SelfConsistentAssignments) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> cc(0.01, 0.5);
  for (int t = 0; t < 20; ++t) {
    const Dataset d = RandomDataset(rng, 8, 2, -2, 2);
    const double c0 = cc(rng);
    const CoefficientSet c = CoefficientSet::Uniform(2, 2, 3);
    const double eps = default_epsilon(c0, 8, c);
    const IPInstance inst = build_slim(d, c0, eps, 0.5, c, {}, {}, {.warn = false});
    for (const auto& lam : AllLambdas(c)) {
      const auto x = complete(inst, lam);
      ASSERT_TRUE(x.has_value());
      EXPECT_TRUE(feasible(inst, *x));
      EXPECT_EQ(extract_lambda(inst, *x), lam);
      // gamma 0.5 on integer data: psi matches the 0-1 indicator
      EXPECT_NEAR(evaluate(inst, *x), objective(decode(inst, lam), d, c0, eps), 1e-9);
    }
  }
}

TEST(Instance, MissingDataAdjustsPenalty) {
  std::istringstream in("a,b,y\n1,,1\n0,1,-1\n1,0,1\n,1,-1\n");
  const Dataset d = parse_csv(in, "y");
  const IPInstance inst = build_slim(d, 0.01, 0, 0.1, CoefficientSet::Uniform(2, 2, 2), {}, {}, {.warn = false});
  EXPECT_NEAR(inst.objective[inst.alpha[1]], 0.01 + 1.0 / 4.0, 1e-15);
  EXPECT_NEAR(inst.objective[inst.alpha[2]], 0.01 + 1.0 / 4.0, 1e-15);
}

TEST(Instance, WriteLp) {
  const Dataset d = Dataset::FromRows({{1}, {0}}, {1, -1}, {"a"});
  const IPInstance inst = build_slim(d, 0.01, 1e-3, 0.1, CoefficientSet::Uniform(1, 2, 2), {}, {}, {.warn = false});
  std::ostringstream out;
  write_lp(inst, out);
  const std::string s = out.str();
  for (const char* section : {"Minimize", "Subject To", "Bounds", "General", "Binary", "End"}) {
    EXPECT_NE(s.find(section), std::string::npos) << section;
  }
}

TEST(Pilm, SelectorCountsAndForcedZero) {
  const Dataset d = Dataset::FromRows({{1, 0}, {0, 1}, {1, 1}}, {1, -1, 1}, {"a", "b"});
  InterpretabilitySet small{{}, 0.01}, large{{}, 0.05};
  for (int v = 1; v <= 10; ++v) small.values.insert(small.values.end(), {v, -v});
  for (int v = 11; v <= 100; ++v) large.values.insert(large.values.end(), {v, -v});
  const IPInstance inst = build_pilm(d, {{{0}, 0.0}, small, large}, 100, 0.1, {});
  EXPECT_EQ(inst.selectors[1].size(), 201u);
  EXPECT_EQ(inst.selectors[2].size(), 201u);

  const IPInstance zero = build_pilm(d, {{{0}, 0.0}}, 5, 0.1, {});
  const OracleResult r = enumerate_instance(zero);
  for (const auto& lam : r.optima) {
    EXPECT_EQ(lam[1], 0);
    EXPECT_EQ(lam[2], 0);
  }
  EXPECT_THROW(build_pilm(d, {{{0, 1}, 0.0}, {{1, 2}, 0.1}}, 5, 0.1, {}), InputError);
  EXPECT_THROW(build_pilm(d, {{{0}, 0.1}, {{1}, 0.05}}, 5, 0.1, {}), InputError);
}

TEST(Pilm, MatchesSlimWithoutL1) {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> cc(0.01, 0.3);
  for (int t = 0; t < 25; ++t) {
    const Dataset d = RandomDataset(rng, 8, 2, -1, 2);
    const double c0 = cc(rng);
    const IPInstance slim = build_slim(d, c0, 0.0, 0.1, CoefficientSet::Uniform(2, 2, 3), {}, {}, {.warn = false});
    const IPInstance pilm = build_pilm(d, {{{0}, 0.0}, {{-2, -1, 1, 2}, c0}}, 3, 0.1, {});
    EXPECT_NEAR(enumerate_instance(slim).objective, enumerate_instance(pilm).objective, 1e-12) << "case " << t;
    const SolveResult b = branch_and_bound(pilm, {.time_limit = 0});
    ASSERT_EQ(b.status, SolveStatus::kOptimal);
    EXPECT_NEAR(b.incumbent_objective, enumerate_instance(slim).objective, 1e-12);
  }
}

TEST(MofN, DecodeAndToy) {
  const Dataset d = Dataset::FromRows({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {-1, 1, 1, 1}, {"r1", "r2"});
  const IPInstance inst = build_mofn(d, 0.01, 0.1, {});
  EXPECT_EQ(inst.vars[inst.lambda[0]].lower, -2.0);
  EXPECT_EQ(inst.vars[inst.lambda[0]].upper, 0.0);
  const MofNTable zero = decode_mofn(inst, {0, 0, 0});
  EXPECT_EQ(zero.m, 1);
  EXPECT_TRUE(zero.rules.empty());

  const OracleResult r = enumerate_instance(inst);
  ASSERT_EQ(r.optima.size(), 1u);
  const MofNTable t = decode_mofn(inst, r.optima[0]);
  EXPECT_EQ(t.m, 1);
  EXPECT_EQ(t.rules.size(), 2u);
  EXPECT_NE(render_mofn(t).find("AT LEAST 1 OF THE FOLLOWING 2 RULES"), std::string::npos);

  const Dataset real = Dataset::FromRows({{0.5}, {1}}, {-1, 1}, {"r"});
  EXPECT_THROW(build_mofn(real, 0.01, 0.1, {}), InputError);
}

TEST(Tilm, AuxiliaryValues) {
  const Dataset d = Dataset::FromRows({{1, 1, 0}, {1, 0, 0}, {0, 0, 0}}, {1, 1, -1}, {"v>=1", "v>=2", "v>=3"});
  const IPInstance inst = build_tilm(d, {{1, 2, 3}}, 0.05, 0.01, 1e-4, 2, 3, 5, 0.1, {});
  const auto two = complete(inst, {-1, 2, 1, 0});
  ASSERT_TRUE(two.has_value());
  EXPECT_EQ((*two)[inst.nu[0]], 1.0);
  EXPECT_EQ((*two)[inst.tau[0]], 1.0);
  const auto none = complete(inst, {0, 0, 0, 0});
  ASSERT_TRUE(none.has_value());
  EXPECT_EQ((*none)[inst.nu[0]], 0.0);
  EXPECT_EQ((*none)[inst.tau[0]], 0.0);
  EXPECT_FALSE(complete(inst, {0, 2, -1, 0}).has_value());
  EXPECT_FALSE(complete(inst, {0, 1, 1, 1}).has_value());  // r_max = 2
  EXPECT_THROW(build_tilm(d, {{}}, 0.05, 0.01, 1e-4, 2, 3, 5, 0.1, {}), InputError);
}

TEST(Tilm, SolverMatchesEnumeration) {
  std::mt19937 rng(77);
  for (int t = 0; t < 10; ++t) {
    const Dataset d = RandomDataset(rng, 10, 3, 0, 1);
    const IPInstance inst = build_tilm(d, {{1, 2}, {3}}, 0.03, 0.02, 1e-3, 1, 2, 2, 0.1, {});
    const OracleResult r = enumerate_instance(inst);
    const SolveResult b = branch_and_bound(inst, {.time_limit = 0});
    ASSERT_EQ(b.status, SolveStatus::kOptimal);
    EXPECT_NEAR(b.incumbent_objective, r.objective, 1e-12);
  }
}

}  // namespace
}  // namespace slim
