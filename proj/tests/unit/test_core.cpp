#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "zest/proposal.hpp"
#include "zest/rng.hpp"
#include "zest/running_example.hpp"
#include "zest/sample.hpp"

namespace zest {
namespace {

LabeledSample with_labels(std::vector<Label> labels, std::size_t k) {
  std::vector<double> coords(labels.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = 0.25 * static_cast<double>(i);
  return LabeledSample(1, k, std::move(coords), std::move(labels));
}

TEST(CountsView, SmallExample) {
  const auto counts = counts_from_sample(with_labels({1, 0, 1}, 2));
  EXPECT_EQ(counts.count(0), 1u);
  EXPECT_EQ(counts.count(1), 2u);
  ASSERT_EQ(counts.positions(1).size(), 2u);
  EXPECT_EQ(counts.positions(1)[0], 0u);
  EXPECT_EQ(counts.positions(1)[1], 2u);
  EXPECT_EQ(counts.positions(0)[0], 1u);
  EXPECT_EQ(counts.total(), 3u);
}

TEST(CountsView, SingleLabel) {
  const auto counts = counts_from_sample(with_labels({0, 0, 0}, 1));
  EXPECT_EQ(counts.count(0), 3u);
  const auto pos = counts.positions(0);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(pos[j], j);
  EXPECT_EQ(k_eff(counts), 1u);
}

TEST(CountsView, AbsentLabelIsEmpty) {
  const auto counts = counts_from_sample(with_labels({2, 2}, 4));
  EXPECT_EQ(counts.count(0), 0u);
  EXPECT_TRUE(counts.positions(3).empty());
}

TEST(CountsView, LargeRandomAgainstNaiveRescan) {
  RngStream rng(42);
  std::vector<Label> labels(10000);
  for (auto& l : labels) l = static_cast<Label>(rng() % 50);
  const LabeledSample sample = with_labels(labels, 50);
  const auto counts = counts_from_sample(sample);

  std::size_t total = 0;
  for (Label i = 0; i < 50; ++i) {
    std::vector<std::size_t> naive;
    for (std::size_t n = 0; n < labels.size(); ++n)
      if (labels[n] == i) naive.push_back(n);
    const auto pos = counts.positions(i);
    ASSERT_EQ(std::vector<std::size_t>(pos.begin(), pos.end()), naive);
    total += counts.count(i);
  }
  EXPECT_EQ(total, 10000u);

  const StratifiedSample grouped = group_by_label(sample, counts);
  EXPECT_EQ(grouped.total(), 10000u);
  EXPECT_EQ(ungroup(grouped, counts), sample);
}

TEST(KEff, Examples) {
  EXPECT_EQ(k_eff(counts_from_sample(with_labels({0, 0, 1}, 5))), 2u);
  EXPECT_EQ(k_eff(counts_from_sample(with_labels({3, 3, 3, 3}, 5))), 1u);
}

TEST(KEff, NeverExceedsKOrN) {
  RngStream rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 20;
    const std::size_t n = 1 + rng() % 20;
    std::vector<Label> labels(n);
    for (auto& l : labels) l = static_cast<Label>(rng() % k);
    EXPECT_LE(k_eff(counts_from_sample(with_labels(labels, k))), std::min(k, n));
  }
}

TEST(Adapter, SingleComponentJointEqualsComponent) {
  auto family = std::make_shared<GaussianGridFamily>(1, 0.5, 2.0);
  const auto joint = adapt_tractable_as_joint(family);
  for (double x : {-3.0, 0.0, 1.7}) {
    const double p[1] = {x};
    EXPECT_DOUBLE_EQ(joint->log_density(p, 0), family->log_component_density(0, p));
  }
}

TEST(Adapter, UniformLabelsShiftByLogK) {
  auto family = std::make_shared<GaussianGridFamily>(3, 0.5, 2.0);
  const auto joint = adapt_tractable_as_joint(family);
  const double p[1] = {0.3};
  for (Label l = 0; l < 3; ++l)
    EXPECT_NEAR(joint->log_density(p, l), family->log_component_density(l, p) - std::log(3.0), 1e-13);
}

TEST(Adapter, JointSumsToMixtureMarginal) {
  auto family = std::make_shared<GaussianGridFamily>(7, 0.3, 4.0);
  const auto joint = adapt_tractable_as_joint(family);
  RngStream rng(3);
  for (int i = 0; i < 100; ++i) {
    const double p[1] = {-8.0 + 16.0 * rng.uniform()};
    double sum = 0.0;
    double marginal = 0.0;
    for (Label l = 0; l < 7; ++l) {
      sum += std::exp(joint->log_density(p, l));
      marginal += std::exp(family->label_log_pmf(l) + family->log_component_density(l, p));
    }
    EXPECT_NEAR(sum, marginal, 1e-12 * std::max(1.0, marginal));
    EXPECT_NEAR(std::log(sum), family->log_marginal_density(p), 1e-12);
  }
}

TEST(RngStream, SameAddressSameSequence) {
  const RngStream master(2024);
  auto a = master.substream(3).substream(7);
  auto b = RngStream(2024).substream(3).substream(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(RngStream, SubstreamDoesNotAdvanceParent) {
  RngStream a(5);
  RngStream b(5);
  (void)a.substream(1);
  EXPECT_EQ(a(), b());
}

TEST(RngStream, SiblingsDiffer) {
  const RngStream master(11);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(master.substream(i)());
  EXPECT_EQ(firsts.size(), 1000u);
}

TEST(RngStream, UniformIsOpenInterval) {
  RngStream rng(1);
  double mean = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Sampling, DeterministicForFixedSeed) {
  GaussianGridFamily family(30, 0.5, 2.0);
  RngStream a(77);
  RngStream b(77);
  EXPECT_EQ(draw_labeled_sample(family, 500, a), draw_labeled_sample(family, 500, b));
}

}  // namespace
}  // namespace zest
