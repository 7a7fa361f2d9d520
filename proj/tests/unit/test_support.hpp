#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "zest/proposal.hpp"

namespace zest::testing {

inline double normal_log_pdf(double x, double mu, double sd) {
  const double z = (x - mu) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

// Gaussian components with arbitrary means, a common standard deviation and
// explicit label probabilities. Uses the base-class log_weighted_sum, so it
// exercises a different code path from GaussianGridFamily.
class NormalFamily final : public ProposalFamily {
 public:
  NormalFamily(std::vector<double> mu, double sd, std::vector<double> alpha)
      : mu_(std::move(mu)), sd_(sd), alpha_(std::move(alpha)) {
    if (mu_.size() != alpha_.size()) throw std::invalid_argument("NormalFamily: size mismatch");
  }

  std::size_t dim() const override { return 1; }
  std::size_t num_components() const override { return mu_.size(); }
  double log_component_density(Label l, PointView x) const override {
    return normal_log_pdf(x[0], mu_[l], sd_);
  }
  void sample_component(Label l, RngStream& rng, PointSpan out) const override {
    out[0] = mu_[l] + sd_ * rng.normal();
  }
  double label_log_pmf(Label l) const override { return std::log(alpha_[l]); }
  Label sample_label(RngStream& rng) const override {
    double u = rng.uniform();
    for (Label l = 0; l + 1 < alpha_.size(); ++l) {
      if (u < alpha_[l]) return l;
      u -= alpha_[l];
    }
    return static_cast<Label>(alpha_.size() - 1);
  }

 private:
  std::vector<double> mu_;
  double sd_;
  std::vector<double> alpha_;
};

// Uniform components on [lower_l, upper_l].
class BoxFamily final : public ProposalFamily {
 public:
  BoxFamily(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {}

  std::size_t dim() const override { return 1; }
  std::size_t num_components() const override { return lower_.size(); }
  double log_component_density(Label l, PointView x) const override {
    if (x[0] < lower_[l] || x[0] > upper_[l]) return kNegInf;
    return -std::log(upper_[l] - lower_[l]);
  }
  void sample_component(Label l, RngStream& rng, PointSpan out) const override {
    out[0] = lower_[l] + (upper_[l] - lower_[l]) * rng.uniform();
  }
  double label_log_pmf(Label) const override { return -std::log(static_cast<double>(lower_.size())); }
  Label sample_label(RngStream& rng) const override {
    return static_cast<Label>(rng() % lower_.size());
  }

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// N(mu, sd^2) scaled by `scale`, so Z = scale.
class ScaledNormalTarget final : public Target {
 public:
  ScaledNormalTarget(double mu = 0.0, double sd = 1.0, double scale = 1.0)
      : mu_(mu), sd_(sd), log_scale_(std::log(scale)) {}
  std::size_t dim() const override { return 1; }
  double log_density(PointView x) const override { return log_scale_ + normal_log_pdf(x[0], mu_, sd_); }

 private:
  double mu_;
  double sd_;
  double log_scale_;
};

// Zero outside (lower, upper), standard normal inside.
class TruncatedNormalTarget final : public Target {
 public:
  TruncatedNormalTarget(double lower, double upper) : lower_(lower), upper_(upper) {}
  std::size_t dim() const override { return 1; }
  double log_density(PointView x) const override {
    if (x[0] <= lower_ || x[0] >= upper_) return kNegInf;
    return normal_log_pdf(x[0], 0.0, 1.0);
  }

 private:
  double lower_;
  double upper_;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace zest::testing
