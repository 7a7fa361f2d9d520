#include "zest/running_example.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace zest {

namespace {

constexpr double kLogRootTwoPi = 0.91893853320467274178;  // log sqrt(2 pi)
constexpr double kLogRootFourPi = 1.26551212348464539649;  // log sqrt(4 pi)

void check_betabinom(std::size_t k, double m, double s) {
  if (k < 1) throw std::invalid_argument("beta-binomial: K must be at least 1");
  if (!(m > 0.0 && m < 1.0)) throw std::invalid_argument("beta-binomial: m must lie in (0, 1)");
  if (!(s > 0.0)) throw std::invalid_argument("beta-binomial: s must be positive or inf");
}

double log_beta_fn(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double betabinom_label_log_pmf(std::size_t k, double m, double s, Label l) {
  check_betabinom(k, m, s);
  if (l >= k) throw std::invalid_argument("beta-binomial: label out of range");
  if (k == 1) return 0.0;
  const double trials = static_cast<double>(k - 1);
  const double b = static_cast<double>(l);
  if (std::isinf(s))
    return log_choose(trials, b) + b * std::log(m) + (trials - b) * std::log1p(-m);
  const double a1 = s * m;
  const double a2 = s * (1.0 - m);
  return log_choose(trials, b) + log_beta_fn(b + a1, trials - b + a2) - log_beta_fn(a1, a2);
}

double betabinom_label_pmf(std::size_t k, double m, double s, Label l) {
  return std::exp(betabinom_label_log_pmf(k, m, s, l));
}

std::vector<double> betabinom_label_pmf_table(std::size_t k, double m, double s) {
  check_betabinom(k, m, s);
  std::vector<double> p(k);
  double total = 0.0;
  for (std::size_t l = 0; l < k; ++l) {
    p[l] = betabinom_label_pmf(k, m, s, static_cast<Label>(l));
    total += p[l];
  }
  for (double& v : p) v /= total;
  return p;
}

double StandardNormalTarget::log_density(PointView x) const {
  return -0.5 * x[0] * x[0] - kLogRootTwoPi;
}

GaussianGridFamily::GaussianGridFamily(std::size_t k, double m, double s, double mu_min, double mu_max)
    : m_(m), s_(s) {
  check_betabinom(k, m, s);
  if (!(mu_min <= mu_max)) throw std::invalid_argument("GaussianGridFamily: mu_min must not exceed mu_max");
  mu_.resize(k);
  if (k == 1) {
    mu_[0] = 0.5 * (mu_min + mu_max);
  } else {
    const double span = mu_max - mu_min;
    for (std::size_t l = 0; l < k; ++l)
      mu_[l] = span * static_cast<double>(l) / static_cast<double>(k - 1) + mu_min;
  }
  const std::vector<double> pmf = betabinom_label_pmf_table(k, m, s);
  log_pmf_.resize(k);
  cdf_.resize(k);
  double cum = 0.0;
  for (std::size_t l = 0; l < k; ++l) {
    log_pmf_[l] = std::log(pmf[l]);
    cum += pmf[l];
    cdf_[l] = cum;
  }
  cdf_.back() = 1.0;
}

double GaussianGridFamily::log_component_density(Label l, PointView x) const {
  const double d = x[0] - mu_[l];
  return -0.25 * d * d - kLogRootFourPi;
}

void GaussianGridFamily::sample_component(Label l, RngStream& rng, PointSpan out) const {
  out[0] = mu_[l] + std::numbers::sqrt2 * rng.normal();
}

Label GaussianGridFamily::sample_label(RngStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf_.begin());
  return static_cast<Label>(std::min(idx, cdf_.size() - 1));
}

double GaussianGridFamily::log_weighted_sum(PointView x, std::span<const LabelWeight> terms,
                                            double exponent) const {
  if (terms.empty()) return kNegInf;
  thread_local std::vector<double> values;
  values.resize(terms.size());
  const double xv = x[0];
  double max = kNegInf;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double d = xv - mu_[terms[j].label];
    const double v = terms[j].log_weight + exponent * (-0.25 * d * d - kLogRootFourPi);
    values[j] = v;
    max = v > max ? v : max;
  }
  if (max == kNegInf) return kNegInf;
  double sum = 0.0;
  for (std::size_t j = 0; j < terms.size(); ++j) sum += std::exp(values[j] - max);
  return max + std::log(sum);
}

double GaussianGridFamily::log_marginal_density(PointView x) const {
  const std::size_t k = mu_.size();
  thread_local std::vector<double> values;
  values.resize(k);
  const double xv = x[0];
  double max = kNegInf;
  for (std::size_t l = 0; l < k; ++l) {
    const double d = xv - mu_[l];
    const double v = log_pmf_[l] - 0.25 * d * d - kLogRootFourPi;
    values[l] = v;
    max = v > max ? v : max;
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < k; ++l) sum += std::exp(values[l] - max);
  return max + std::log(sum);
}

RunningExample make_running_example(std::size_t k, double m, double s, double mu_min, double mu_max) {
  return {std::make_shared<StandardNormalTarget>(),
          std::make_shared<GaussianGridFamily>(k, m, s, mu_min, mu_max)};
}

OrderedInsertProposal::OrderedInsertProposal(std::size_t n)
    : n_(n), log_n_factorial_(std::lgamma(static_cast<double>(n) + 1.0)) {
  if (n < 1) throw std::invalid_argument("OrderedInsertProposal: n must be at least 1");
}

Label OrderedInsertProposal::sample(RngStream& rng, PointSpan out) const {
  std::vector<double> y(n_);
  for (double& v : y) v = rng.normal();
  std::sort(y.begin(), y.end());
  const double extra = rng.normal();
  const auto rank = static_cast<std::size_t>(std::upper_bound(y.begin(), y.end(), extra) - y.begin());
  std::copy(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(rank), out.begin());
  out[rank] = extra;
  std::copy(y.begin() + static_cast<std::ptrdiff_t>(rank), y.end(),
            out.begin() + static_cast<std::ptrdiff_t>(rank) + 1);
  return static_cast<Label>(rank);
}

double OrderedInsertProposal::log_density(PointView x, Label l) const {
  if (x.size() != n_ + 1 || l > n_) throw std::invalid_argument("OrderedInsertProposal: bad point or label");
  double total = log_n_factorial_;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && !(x[i] > x[i - 1])) return kNegInf;
    total += -0.5 * x[i] * x[i] - kLogRootTwoPi;
  }
  return total;
}

AscendingNormalTarget::AscendingNormalTarget(std::size_t dim, double shift) : dim_(dim), shift_(shift) {
  if (dim < 1) throw std::invalid_argument("AscendingNormalTarget: dim must be positive");
}

double AscendingNormalTarget::log_density(PointView x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (i > 0 && !(x[i] > x[i - 1])) return kNegInf;
    const double d = x[i] - shift_;
    total += -0.5 * d * d - kLogRootTwoPi;
  }
  return total;
}

double AscendingNormalTarget::log_normalizer() const {
  return -std::lgamma(static_cast<double>(dim_) + 1.0);
}

}  // namespace zest
