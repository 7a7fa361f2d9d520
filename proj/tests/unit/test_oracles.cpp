#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"
#include "zest/oracles.hpp"
#include "zest/running_example.hpp"

namespace zest {
namespace {

TEST(Quadrature, StandardNormal) {
  StandardNormalTarget target;
  EXPECT_NEAR(quadrature_z(target, {-10.0, 10.0, 2001}), 1.0, 1e-10);
  EXPECT_NEAR(quadrature_z(target), 1.0, 1e-10);
}

TEST(Quadrature, Scaling) {
  testing::ScaledNormalTarget target(0.3, 1.0, 2.0);
  EXPECT_NEAR(quadrature_z(target), 2.0, 1e-10);
}

TEST(Quadrature, ToleranceFailureThrows) {
  // Too few nodes for a narrow bump.
  EXPECT_THROW(integrate_1d([](double x) { return std::exp(-x * x * 400.0); }, {-12.0, 12.0, 11}),
               NumericalError);
}

TEST(Quadrature, AscendingRegion) {
  // Half of the standard bivariate normal mass lies above the diagonal.
  const double v = simpson_2d_ascending(
      [](double a, double b) { return std::exp(-0.5 * (a * a + b * b)) / (2.0 * std::numbers::pi); },
      {-10.0, 10.0, 801});
  EXPECT_NEAR(v, 0.5, 1e-6);
}

TEST(Quadrature, TauMatchesMonteCarlo) {
  auto family = std::make_shared<GaussianGridFamily>(3, 0.5, 2.0);
  const auto joint = adapt_tractable_as_joint(family);
  StandardNormalTarget target;
  const auto tau = quadrature_tau(target, *joint);
  // tau_i = E_pi[pi / qbar(., i)] by direct sampling from pi.
  RngStream rng(4);
  const std::size_t n = 1000000;
  for (Label i = 0; i < 3; ++i) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double x[1] = {rng.normal()};
      const double r = std::exp(target.log_density(x) - joint->log_density(x, i));
      s += r;
      s2 += r * r;
    }
    const double mean = s / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    EXPECT_LT(std::abs(mean - tau[i]), 3.0 * se) << "label " << i;
  }
  const std::vector<Label> middle{1};
  EXPECT_EQ(quadrature_tau(target, *joint, {}, middle)[0], tau[1]);
}

TEST(Enumeration, Basics) {
  const std::vector<double> alpha{0.3, 0.7};
  EXPECT_NEAR(enumerate_label_expectation([](std::span<const Label>) { return 1.0; }, alpha, 5), 1.0, 1e-15);

  const double all_first = enumerate_label_expectation(
      [](std::span<const Label> l) {
        for (Label x : l)
          if (x != 0) return 0.0;
        return 1.0;
      },
      alpha, 4);
  EXPECT_NEAR(all_first, std::pow(0.3, 4), 1e-15);

  const double cross = enumerate_label_expectation(
      [](std::span<const Label> l) {
        double n1 = 0, n2 = 0;
        for (Label x : l) (x == 0 ? n1 : n2) += 1;
        return n1 * n2;
      },
      alpha, 3);
  EXPECT_NEAR(cross, 3.0 * 2.0 * 0.3 * 0.7, 1e-14);

  const std::vector<double> big(10, 0.1);
  EXPECT_THROW(enumerate_label_expectation([](std::span<const Label>) { return 1.0; }, big, 7),
               InstanceTooLargeError);
}

TEST(DenseInverse, Examples) {
  const Matrix id = dense_inverse(Matrix::identity(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(id(i, j), i == j ? 1.0 : 0.0);

  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = -1;
  a(1, 0) = -1;
  a(1, 1) = 2;
  const Matrix inv = dense_inverse(a);
  EXPECT_NEAR(inv(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(inv(0, 1), 1.0 / 3.0, 1e-15);

  Matrix singular(2, 2);
  singular(0, 0) = 1;
  singular(0, 1) = -1;
  singular(1, 0) = -1;
  singular(1, 1) = 1;
  EXPECT_THROW(dense_inverse(singular), SingularSystemError);
}

TEST(DenseInverse, ResidualSmall) {
  RngStream rng(6);
  for (std::size_t k = 1; k <= 16; ++k) {
    Matrix a(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) a(i, j) = rng.uniform() + (i == j ? k : 0.0);
    const Matrix r = a * dense_inverse(a);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) EXPECT_NEAR(r(i, j), i == j ? 1.0 : 0.0, 1e-10);
  }
}

TEST(Replicate, ConstantHasZeroVariance) {
  const auto s = replicate([](RngStream&, std::size_t) { return std::vector<double>{4.0}; }, 10, 1);
  EXPECT_EQ(s.variance[0], 0.0);
  EXPECT_EQ(s.mean[0], 4.0);
}

TEST(Replicate, BernoulliMean) {
  const auto s = replicate(
      [](RngStream& rng, std::size_t) { return std::vector<double>{rng.uniform() < 0.5 ? 1.0 : 0.0}; }, 10000,
      2);
  EXPECT_LT(std::abs(s.mean[0] - 0.5), 3.0 * s.se_mean[0]);
  EXPECT_NEAR(s.se_mean[0], 0.005, 0.0005);
}

TEST(Replicate, DeterministicAndWorkerIndependent) {
  auto fn = [](RngStream& rng, std::size_t) { return std::vector<double>{rng.normal(), rng.uniform()}; };
  const auto a = replicate(fn, 300, 9, 1);
  const auto b = replicate(fn, 300, 9, 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.se_mean, b.se_mean);
  EXPECT_EQ(a.covariance, b.covariance);
}

TEST(Replicate, CovarianceOfLinearPair) {
  const auto s = replicate(
      [](RngStream& rng, std::size_t) {
        const double z = rng.normal();
        return std::vector<double>{z, -2.0 * z};
      },
      2000, 3);
  EXPECT_NEAR(s.covariance[1], -2.0 * s.variance[0], 1e-12);
}

TEST(CompareVariances, DetectsClearOrdering) {
  RngStream rng(1);
  std::vector<double> small(500), large(500);
  for (auto& v : small) v = 0.5 * rng.normal();
  for (auto& v : large) v = 2.0 * rng.normal();
  const auto c = compare_variances(small, large, 11);
  EXPECT_LT(c.difference, 0.0);
  EXPECT_LT(c.upper_bound, 0.0);
  const auto d = compare_variances(large, small, 11);
  EXPECT_GT(d.upper_bound, 0.0);
}

TinyInstance tiny_instance() {
  auto ex = make_running_example(2, 0.5, 2.0, -1.0, 1.0);
  return TinyInstance{ex.target, ex.family, 2, {}};
}

TEST(Rejection, GammaZeroIndexUniform) {
  const auto inst = tiny_instance();
  RngStream rng(3);
  const auto draws = rejection_sample_extended(inst, 0.0, Scheme::purely_geometric, 10000, rng);
  // The envelope carries a 5% safety margin over the grid supremum.
  EXPECT_NEAR(draws.acceptance_rate, 1.0 / 1.05, 0.01);
  double ones = 0.0;
  for (const auto& d : draws.draws) ones += d.n == 1;
  const double se = std::sqrt(0.25 / 10000);
  EXPECT_LT(std::abs(ones / 10000 - 0.5), 3.0 * se);
}

// At gamma = 1 and N = 2 the selected coordinate has density
// E_L[ pi(x) q_{L_n}(x) / sum_m q_{L_m}(x) ] with L ~ alpha^2.
TEST(Rejection, GammaOneSelectedMeanMatchesQuadrature) {
  const auto inst = tiny_instance();
  const auto& fam = *inst.family;
  const auto& tgt = *inst.target;
  double num = 0.0, den = 0.0;
  for (Label a = 0; a < 2; ++a)
    for (Label b = 0; b < 2; ++b) {
      const double w = std::exp(fam.label_log_pmf(a) + fam.label_log_pmf(b));
      auto cond = [&](double x) {
        const double p[1] = {x};
        const double qa = std::exp(fam.log_component_density(a, p));
        const double qb = std::exp(fam.log_component_density(b, p));
        return std::exp(tgt.log_density(p)) * qa / (qa + qb);
      };
      num += w * integrate_1d([&](double x) { return x * cond(x); }, {});
      den += w * integrate_1d(cond, {});
    }
  const double expected = num / den;

  RngStream rng(4);
  const auto draws = rejection_sample_extended(inst, 1.0, Scheme::semi_geometric, 10000, rng);
  std::vector<double> sel;
  for (const auto& d : draws.draws) sel.push_back(d.x[d.n]);
  const double se = std::sqrt(testing::sample_variance(sel) / sel.size());
  EXPECT_LT(std::abs(testing::mean_of(sel) - expected), 3.0 * se);
}

TEST(Rejection, RejectsLargeInstances) {
  auto ex = make_running_example(3, 0.5, 2.0);
  TinyInstance inst{ex.target, ex.family, 2, {}};
  RngStream rng(1);
  EXPECT_THROW(rejection_sample_extended(inst, 0.5, Scheme::semi_geometric, 10, rng), std::exception);
}

}  // namespace
}  // namespace zest
