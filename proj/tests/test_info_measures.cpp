#include "snncrs/info_measures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace snncrs;

namespace {

JointPmf fair_bits_copy() { return JointPmf({"X", "Y"}, {2, 2}, {0.5, 0, 0, 0.5}); }

JointPmf bsc(double eps) {
  return JointPmf({"X", "Y"}, {2, 2}, {0.5 * (1 - eps), 0.5 * eps, 0.5 * eps, 0.5 * (1 - eps)});
}

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(n);
  double s = 0;
  for (auto& x : v) s += (x = e(rng));
  for (auto& x : v) x /= s;
  return v;
}

ConditionalPmf random_conditional(std::mt19937_64& rng, Group cl, std::vector<std::size_t> cs,
                                  Group ol, std::vector<std::size_t> os) {
  ConditionalPmf c{std::move(cl), std::move(cs), std::move(ol), std::move(os), {}};
  for (std::size_t r = 0; r < c.rows(); ++r) {
    auto row = random_simplex(rng, c.cols());
    c.table.insert(c.table.end(), row.begin(), row.end());
  }
  return c;
}

}  // namespace

TEST(Entropy, Basics) {
  EXPECT_DOUBLE_EQ(entropy(JointPmf({"A"}, {3}, {0, 1, 0}), {"A"}), 0.0);
  EXPECT_NEAR(entropy(JointPmf({"A"}, {4}, {0.25, 0.25, 0.25, 0.25}), {"A"}), 2.0, 1e-15);
  EXPECT_NEAR(entropy(JointPmf({"A"}, {2}, {0.11, 0.89}), {"A"}), 0.499915958164528, 1e-12);
}

TEST(MutualInfo, TrivialCases) {
  EXPECT_NEAR(mutual_info(JointPmf({"X", "Y"}, {2, 2}, {0.25, 0.25, 0.25, 0.25}), {"X"}, {"Y"}),
              0.0, 1e-15);
  EXPECT_NEAR(mutual_info(fair_bits_copy(), {"X"}, {"Y"}), 1.0, 1e-15);
  EXPECT_NEAR(mutual_info(bsc(0.11), {"X"}, {"Y"}), 0.500084041835472, 1e-12);
}

TEST(MutualInfo, Errors) {
  const auto j = fair_bits_copy();
  EXPECT_THROW(mutual_info(j, {"X"}, {"X"}), LabelError);
  EXPECT_THROW(mutual_info(j, {"X"}, {"Z"}), LabelError);
}

TEST(JointPmf, Validation) {
  EXPECT_THROW(JointPmf({"A", "A"}, {2, 2}, {0.25, 0.25, 0.25, 0.25}), LabelError);
  EXPECT_THROW(JointPmf({"A"}, {2}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(JointPmf({"A"}, {3}, {0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(JointPmf({"A"}, {2}, {-0.1, 1.1}), std::invalid_argument);
}

TEST(JointPmf, MarginalOrder) {
  const JointPmf j({"A", "B"}, {2, 3}, {0.1, 0.2, 0.0, 0.3, 0.1, 0.3});
  const auto b = j.marginal_table({"B"});
  EXPECT_NEAR(b[0], 0.4, 1e-15);
  EXPECT_NEAR(b[1], 0.3, 1e-15);
  EXPECT_NEAR(b[2], 0.3, 1e-15);
  const auto ba = j.marginal_table({"B", "A"});
  EXPECT_NEAR(ba[1], 0.3, 1e-15);  // (B=0, A=1)
}

TEST(MutualInfo, ChainRuleOnRandomJoints) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const JointPmf j({"A", "B", "C", "D"}, {2, 3, 2, 3}, random_simplex(rng, 36));
    // I(A;BC|D) = I(A;C|D) + I(A;B|CD)
    EXPECT_NEAR(mutual_info(j, {"A"}, {"B", "C"}, {"D"}),
                mutual_info(j, {"A"}, {"C"}, {"D"}) + mutual_info(j, {"A"}, {"B"}, {"C", "D"}),
                1e-12);
    const double i = mutual_info(j, {"A", "B"}, {"C"}, {"D"});
    EXPECT_GE(i, 0.0);
    EXPECT_LE(i, std::min(entropy(j, {"A", "B"}), entropy(j, {"C"})) + 1e-12);
  }
}

TEST(BuildJoint, PointMass) {
  const JointPmf pin({"X1", "X2"}, {2, 2}, {0, 1, 0, 0});
  const JointPmf pr({"X30", "X31"}, {2, 2}, {1, 0, 0, 0});
  ConditionalPmf q{{"X30", "X31", "Y3"}, {2, 2, 2}, {"Yh3"}, {2}, {}};
  for (std::size_t r = 0; r < 8; ++r) q.table.insert(q.table.end(), {1.0, 0.0});
  ConditionalPmf ch{{"X1", "X2", "X30", "X31"}, {2, 2, 2, 2}, {"Y2", "Y3", "Y4"}, {2, 2, 2}, {}};
  for (std::size_t r = 0; r < 16; ++r) {
    std::vector<double> row(8, 0.0);
    row[7] = 1.0;
    ch.table.insert(ch.table.end(), row.begin(), row.end());
  }
  const auto j = build_joint_thm2(pin, pr, q, ch);
  double maxp = 0;
  for (double p : j.probabilities()) maxp = std::max(maxp, p);
  EXPECT_DOUBLE_EQ(maxp, 1.0);
  EXPECT_NEAR(entropy(j, thm2_labels()), 0.0, 1e-15);
}

TEST(BuildJoint, MarginalsMatchFactors) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const JointPmf pin({"X1", "X2"}, {2, 2}, random_simplex(rng, 4));
    const JointPmf pr({"X30", "X31"}, {2, 2}, random_simplex(rng, 4));
    const auto q = random_conditional(rng, {"X30", "X31", "Y3"}, {2, 2, 2}, {"Yh3"}, {2});
    const auto ch =
        random_conditional(rng, {"X1", "X2", "X30", "X31"}, {2, 2, 2, 2}, {"Y2", "Y3", "Y4"},
                           {2, 2, 2});
    const auto j = build_joint_thm2(pin, pr, q, ch);
    const auto m = j.marginal_table({"X1", "X2"});
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(m[i], pin.probabilities()[i], 1e-12);
    EXPECT_NEAR(mutual_info(j, {"X1", "X2"}, {"X30", "X31"}), 0.0, 1e-12);
    EXPECT_NEAR(mutual_info(j, {"Yh3"}, {"X1", "X2", "Y2", "Y4"}, {"X30", "X31", "Y3"}), 0.0,
                1e-12);
  }
}

TEST(BuildJoint, RejectsMismatchedAlphabets) {
  const JointPmf pin({"X1", "X2"}, {2, 2}, {0.25, 0.25, 0.25, 0.25});
  const JointPmf pr({"X30", "X31"}, {2, 2}, {0.25, 0.25, 0.25, 0.25});
  std::mt19937_64 rng(1);
  const auto q = random_conditional(rng, {"X30", "X31", "Y3"}, {2, 2, 3}, {"Yh3"}, {2});
  const auto ch = random_conditional(rng, {"X1", "X2", "X30", "X31"}, {2, 2, 2, 2},
                                     {"Y2", "Y3", "Y4"}, {2, 2, 2});
  EXPECT_THROW(build_joint_thm2(pin, pr, q, ch), std::invalid_argument);
}

TEST(GaussianMi, ScalarExamples) {
  GaussianSystem s;
  s.add_input("X", 1.0);
  s.add_output("Y", {{"X", 1.0}});
  EXPECT_NEAR(gaussian_mi(s, {"X"}, {"Y"}), 0.5, 1e-12);

  GaussianSystem t;
  t.add_input("X", 3.0);
  t.add_output("Y", {{"X", 1.0}});
  EXPECT_NEAR(gaussian_mi(t, {"X"}, {"Y"}), 1.0, 1e-12);

  GaussianSystem c(Field::complex);
  c.add_input("X", 3.0);
  c.add_output("Y", {{"X", 1.0}});
  EXPECT_NEAR(gaussian_mi(c, {"X"}, {"Y"}), 2.0, 1e-12);
}

TEST(GaussianMi, MultipleAccess) {
  GaussianSystem s;
  s.add_input("X1", 1.0);
  s.add_input("X2", 1.0);
  s.add_output("Y", {{"X1", 1.0}, {"X2", 1.0}});
  EXPECT_NEAR(gaussian_mi(s, {"X1"}, {"Y"}, {"X2"}), 0.5, 1e-12);
  EXPECT_NEAR(gaussian_mi(s, {"X1", "X2"}, {"Y"}), 0.5 * std::log2(3.0), 1e-12);
  EXPECT_NEAR(gaussian_mi(s, {"X1"}, {"X2"}), 0.0, 1e-12);
}

TEST(GaussianMi, DeterministicCopyIsFlagged) {
  GaussianSystem s(Field::complex);
  s.add_input("X", 1.0);
  s.add_output("Y", {{"X", 1.0}});
  s.add_output("W", {{"X", 2.0}}, 0.0);
  const auto r = gaussian_mi_detail(s, {"Y"}, {"W"}, {"X"});
  EXPECT_TRUE(r.degenerate);
  EXPECT_NEAR(r.bits, 0.0, 1e-9);
  // conditioning on a deterministic function of X does not change I(X;Y)
  EXPECT_NEAR(gaussian_mi(s, {"X"}, {"Y"}), gaussian_mi(s, {"X", "W"}, {"Y"}), 1e-9);
}

TEST(GaussianMi, CorrelatedInputs) {
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 1.0, 1.0, 2.0;
  auto s = GaussianSystem::from_inputs({"A", "B"}, cov, Field::complex);
  EXPECT_NEAR(s.covariance({"A", "B"})(0, 1), 1.0, 1e-12);
  s.add_output("Y", {{"A", 1.0}, {"B", 1.0}});
  EXPECT_NEAR(gaussian_mi(s, {"A", "B"}, {"Y"}), std::log2(1.0 + 6.0), 1e-12);

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(GaussianSystem::from_inputs({"A", "B"}, bad), NotPsdError);
  bad << 1.0, 0.5, 0.4, 1.0;
  EXPECT_THROW(GaussianSystem::from_inputs({"A", "B"}, bad), NotPsdError);
}

TEST(GaussianMi, RankDeficientInputs) {
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 1.0, 1.0, 1.0;
  auto s = GaussianSystem::from_inputs({"A", "B"}, cov, Field::complex);
  s.add_output("Y", {{"A", 1.0}, {"B", 1.0}});
  EXPECT_NEAR(gaussian_mi(s, {"A", "B"}, {"Y"}), std::log2(5.0), 1e-9);
  EXPECT_NEAR(gaussian_mi(s, {"A"}, {"Y"}, {"B"}), 0.0, 1e-9);
}

TEST(GaussianMi, Errors) {
  GaussianSystem s;
  s.add_input("X", 1.0);
  EXPECT_THROW(gaussian_mi(s, {"X"}, {"Q"}), LabelError);
  EXPECT_THROW(gaussian_mi(s, {"X"}, {"X"}), LabelError);
  EXPECT_THROW(s.add_input("X", 1.0), LabelError);
  EXPECT_THROW(s.add_quantized("Xh", "X", 0.0), std::invalid_argument);
}

// Discretize Y = X + Z on a fine grid and compare with the log-det value.
TEST(GaussianMi, AgreesWithDiscretizedDensity) {
  const double P = 2.0;
  const int n = 200;
  const double sx = std::sqrt(P), lim = 6.0;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = -lim + 2 * lim * (i + 0.5) / n;
  std::vector<double> probs;
  double total = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double x = grid[i] * sx, y = grid[k] * std::sqrt(P + 1.0);
      const double p = std::exp(-x * x / (2 * P)) * std::exp(-(y - x) * (y - x) / 2);
      probs.push_back(p);
      total += p;
    }
  for (double& p : probs) p /= total;
  const JointPmf j({"X", "Y"}, {std::size_t(n), std::size_t(n)}, std::move(probs));

  GaussianSystem s;
  s.add_input("X", P);
  s.add_output("Y", {{"X", 1.0}});
  EXPECT_NEAR(mutual_info(j, {"X"}, {"Y"}), gaussian_mi(s, {"X"}, {"Y"}), 0.02);
}
