#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "zest/proposal.hpp"

namespace zest {

/// log P(L = l) for L = B with B ~ BetaBinomial(K-1, s*m, s*(1-m)), labels
/// 0..K-1. s = +inf gives Binomial(K-1, m).
double betabinom_label_log_pmf(std::size_t k, double m, double s, Label l);
double betabinom_label_pmf(std::size_t k, double m, double s, Label l);

/// Full pmf table, renormalized to sum to one.
std::vector<double> betabinom_label_pmf_table(std::size_t k, double m, double s);

/// pi~(x) = N(x; 0, 1), so Z = 1.
class StandardNormalTarget final : public Target {
 public:
  std::size_t dim() const override { return 1; }
  double log_density(PointView x) const override;
};

/// K components N(mu_l, 2) with mu_l spaced linearly over [mu_min, mu_max]
/// (the midpoint when K = 1) and beta-binomial label probabilities.
class GaussianGridFamily final : public ProposalFamily {
 public:
  GaussianGridFamily(std::size_t k, double m, double s, double mu_min = -5.0, double mu_max = 5.0);

  std::size_t dim() const override { return 1; }
  std::size_t num_components() const override { return mu_.size(); }

  double log_component_density(Label l, PointView x) const override;
  void sample_component(Label l, RngStream& rng, PointSpan out) const override;
  double label_log_pmf(Label l) const override { return log_pmf_[l]; }
  Label sample_label(RngStream& rng) const override;

  double log_weighted_sum(PointView x, std::span<const LabelWeight> terms,
                          double exponent = 1.0) const override;
  double log_marginal_density(PointView x) const override;

  double mu(Label l) const { return mu_[l]; }
  double m() const { return m_; }
  double s() const { return s_; }

 private:
  double m_;
  double s_;
  std::vector<double> mu_;
  std::vector<double> log_pmf_;
  std::vector<double> cdf_;
};

struct RunningExample {
  std::shared_ptr<const StandardNormalTarget> target;
  std::shared_ptr<const GaussianGridFamily> family;
};

RunningExample make_running_example(std::size_t k, double m, double s, double mu_min = -5.0,
                                    double mu_max = 5.0);

/// Joint proposal on ascending vectors of length n+1: draw n sorted standard
/// normals, insert one more standard normal, and report its rank as the label
/// (0..n). qbar(x, l) = n! prod_i phi(x_i) on the ascending region.
class OrderedInsertProposal final : public JointProposal {
 public:
  explicit OrderedInsertProposal(std::size_t n);

  std::size_t dim() const override { return n_ + 1; }
  std::size_t num_labels() const override { return n_ + 1; }
  Label sample(RngStream& rng, PointSpan out) const override;
  double log_density(PointView x, Label l) const override;

 private:
  std::size_t n_;
  double log_n_factorial_;
};

/// pi~(x) = prod_i N(x_i; shift, 1) on the strictly ascending region, so
/// Z = 1 / dim!.
class AscendingNormalTarget final : public Target {
 public:
  AscendingNormalTarget(std::size_t dim, double shift);

  std::size_t dim() const override { return dim_; }
  double log_density(PointView x) const override;
  /// log Z = -log(dim!).
  double log_normalizer() const;

 private:
  std::size_t dim_;
  double shift_;
};

}  // namespace zest
