#include "zest/combination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "zest/oracles.hpp"

namespace zest {

BetaPolicy beta_uniform(std::size_t num_labels) {
  if (num_labels == 0) throw std::invalid_argument("beta_uniform: K must be positive");
  const double log_b = -std::log(static_cast<double>(num_labels));
  return {BetaKind::uniform, [log_b](PointView, Label) { return log_b; }, 0};
}

BetaPolicy beta_opt(const JointProposal& joint) {
  const std::size_t k = joint.num_labels();
  auto fn = [&joint, k](PointView x, Label l) {
    LogSumExp acc;
    double own = kNegInf;
    for (std::size_t i = 0; i < k; ++i) {
      const double lq = joint.log_density(x, static_cast<Label>(i));
      if (i == l) own = lq;
      acc.add(lq);
    }
    const double denom = acc.value();
    if (denom == kNegInf) throw DomainError("beta_opt: sum_k qbar(x,k) = 0");
    return own - denom;
  };
  return {BetaKind::optimal, std::move(fn), k};
}

EstimateReport z_beta(const LabeledSample& sample, const Target& target, const JointProposal& joint,
                      const BetaPolicy& policy) {
  if (sample.empty()) throw std::invalid_argument("z_beta: empty sample");
  LogSumExp acc;
  for (std::size_t n = 0; n < sample.size(); ++n) {
    const auto x = sample.point(n);
    const Label l = sample.label(n);
    const double lp = target.log_density(x);
    if (lp == kNegInf) continue;
    const double lq = joint.log_density(x, l);
    if (lq == kNegInf) throw DomainError("z_beta: qbar(x_n, l_n) = 0 for an emitted pair");
    acc.add(lp + policy.log_beta(x, l) - lq);
  }
  const auto n = static_cast<std::uint64_t>(sample.size());
  const double log_n = std::log(static_cast<double>(n));
  return make_report(acc.value() - log_n, k_eff(counts_from_sample(sample)),
                     n * std::max<std::uint64_t>(1, policy.evaluations_per_point));
}

namespace {

// log Zhat_i for each label present, in CountsView group order.
std::vector<double> log_z_i_support(const LabeledSample& sample, const CountsView& counts,
                                    const Target& target, const JointProposal& joint) {
  const double log_n = std::log(static_cast<double>(sample.size()));
  std::vector<double> out;
  out.reserve(counts.groups().size());
  for (const LabelGroup& g : counts.groups()) {
    LogSumExp acc;
    for (std::size_t pos : g.positions) {
      const auto x = sample.point(pos);
      const double lp = target.log_density(x);
      if (lp == kNegInf) continue;
      const double lq = joint.log_density(x, g.label);
      if (lq == kNegInf) throw DomainError("z_i_per_label: qbar(x_n, l_n) = 0 for an emitted pair");
      acc.add(lp - lq);
    }
    out.push_back(acc.value() - log_n);
  }
  return out;
}

}  // namespace

std::vector<double> z_i_per_label(const LabeledSample& sample, const Target& target,
                                  const JointProposal& joint) {
  if (sample.empty()) throw std::invalid_argument("z_i_per_label: empty sample");
  const CountsView counts = counts_from_sample(sample);
  const auto log_z = log_z_i_support(sample, counts, target, joint);
  std::vector<double> dense(joint.num_labels(), 0.0);
  for (std::size_t g = 0; g < log_z.size(); ++g)
    dense[counts.groups()[g].label] = std::exp(log_z[g]);
  return dense;
}

SigmaInverse::SigmaInverse(TauVector tau) {
  if (tau.values.empty()) throw std::invalid_argument("SigmaInverse: empty tau");
  inv_tau_.reserve(tau.values.size());
  double s = 0.0;
  for (double t : tau.values) {
    if (!(t > 0.0)) throw std::invalid_argument("SigmaInverse: tau entries must be positive");
    inv_tau_.push_back(1.0 / t);
    s += 1.0 / t;
  }
  denom_ = 1.0 - s;
  if (std::abs(denom_) < 1e-12)
    throw SingularSystemError("Sigma = diag(tau) - 11^T is singular (sum 1/tau = 1)");
}

std::vector<double> SigmaInverse::apply(std::span<const double> v) const {
  if (v.size() != inv_tau_.size()) throw std::invalid_argument("SigmaInverse: size mismatch");
  double proj = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) proj += v[i] * inv_tau_[i];
  const double scale = proj / denom_;
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = inv_tau_[i] * (v[i] + scale);
  return out;
}

SigmaInverse sigma_inverse_action(const TauVector& tau) { return SigmaInverse(tau); }

bool WeightSimplex::any_negative() const {
  return std::find(negative.begin(), negative.end(), true) != negative.end();
}

WeightSimplex optimal_weights(const TauVector& tau) {
  const SigmaInverse inv(tau);
  const std::vector<double> ones(inv.size(), 1.0);
  std::vector<double> u = inv.apply(ones);
  const double total = std::accumulate(u.begin(), u.end(), 0.0);
  if (!std::isfinite(total) || std::abs(total) < 1e-300)
    throw SingularSystemError("optimal_weights: 1^T Sigma^{-1} 1 vanishes");
  WeightSimplex w;
  w.nu.reserve(u.size());
  w.negative.reserve(u.size());
  for (double ui : u) {
    w.nu.push_back(ui / total);
    w.negative.push_back(w.nu.back() < 0.0);
  }
  return w;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("project_to_simplex: empty vector");
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumsum += sorted[j];
    const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

TauVector tau_hat(const LabeledSample& sample, const Target& target, const JointProposal& joint) {
  if (sample.empty()) throw std::invalid_argument("tau_hat: empty sample");
  const std::size_t k = joint.num_labels();
  const double log_k = std::log(static_cast<double>(k));
  LogSumExp w_sum;
  std::vector<LogSumExp> acc(k);
  for (std::size_t n = 0; n < sample.size(); ++n) {
    const auto x = sample.point(n);
    const double lp = target.log_density(x);
    if (lp == kNegInf) continue;
    const double lq_own = joint.log_density(x, sample.label(n));
    if (lq_own == kNegInf) throw DomainError("tau_hat: qbar(x_n, l_n) = 0 for an emitted pair");
    const double log_w = lp - log_k - lq_own;
    w_sum.add(log_w);
    for (std::size_t i = 0; i < k; ++i) {
      const double lq = joint.log_density(x, static_cast<Label>(i));
      if (lq == kNegInf) {
        acc[i].add(std::numeric_limits<double>::infinity());
        continue;
      }
      acc[i].add(log_w + lp - lq);
    }
  }
  const double log_w_total = w_sum.value();
  if (log_w_total == kNegInf) throw DomainError("tau_hat: all importance weights are zero");
  const double log_n = std::log(static_cast<double>(sample.size()));
  TauVector tau;
  tau.values.reserve(k);
  for (std::size_t i = 0; i < k; ++i) tau.values.push_back(std::exp(log_n - 2.0 * log_w_total + acc[i].value()));
  return tau;
}

namespace {

// log sum_g nu_g exp(log_z_g); -inf if the signed sum is not positive.
double log_weighted_combination(std::span<const double> nu, std::span<const double> log_z,
                                double* linear) {
  double shift = kNegInf;
  for (double lz : log_z) shift = std::max(shift, lz);
  if (shift == kNegInf) {
    *linear = 0.0;
    return kNegInf;
  }
  double sum = 0.0;
  for (std::size_t g = 0; g < nu.size(); ++g) sum += nu[g] * std::exp(log_z[g] - shift);
  *linear = sum * std::exp(shift);
  return sum > 0.0 ? shift + std::log(sum) : kNegInf;
}

}  // namespace

EstimateReport z_comb(const LabeledSample& sample, const Target& target, const JointProposal& joint) {
  if (sample.empty()) throw std::invalid_argument("z_comb: empty sample");
  const CountsView counts = counts_from_sample(sample);
  const auto log_z = log_z_i_support(sample, counts, target, joint);
  const std::size_t support = log_z.size();
  const TauVector tau = tau_hat(sample, target, joint);

  std::vector<double> nu_full(support, 0.0);
  std::vector<double> nu(support, 1.0 / static_cast<double>(support));
  bool fallback = false;
  double support_mass = 0.0;
  double negatives = 0.0;
  try {
    const WeightSimplex w = optimal_weights(tau);
    for (std::size_t g = 0; g < support; ++g) {
      const Label l = counts.groups()[g].label;
      nu_full[g] = w.nu[l];
      support_mass += w.nu[l];
      if (w.negative[l]) negatives += 1.0;
    }
    if (std::abs(support_mass) > 1e-300 && std::isfinite(support_mass)) {
      for (std::size_t g = 0; g < support; ++g) nu[g] = nu_full[g] / support_mass;
    } else {
      fallback = true;
    }
  } catch (const SingularSystemError&) {
    fallback = true;
    std::fill(nu_full.begin(), nu_full.end(), 1.0 / static_cast<double>(support));
  }

  double linear = 0.0;
  const double log_est = log_weighted_combination(nu, log_z, &linear);
  double full_linear = 0.0;
  log_weighted_combination(nu_full, log_z, &full_linear);

  const auto n = static_cast<std::uint64_t>(sample.size());
  EstimateReport r = make_report(log_est, support, n * joint.num_labels());
  r.z_hat = linear;
  r.diagnostics["z_full_support"] = full_linear;
  r.diagnostics["negative_weights"] = negatives;
  r.diagnostics["singular_fallback"] = fallback ? 1.0 : 0.0;
  r.diagnostics["support_mass"] = support_mass;
  return r;
}

GfConfig gf1_config(const CountsView& counts) {
  const double k = static_cast<double>(counts.num_labels());
  const double n = static_cast<double>(counts.total());
  GfConfig cfg;
  cfg.log_rho.assign(counts.total(), kNegInf);
  for (const LabelGroup& g : counts.groups()) {
    const double rho = (1.0 / k - 1.0 + static_cast<double>(g.count())) / n;
    for (std::size_t pos : g.positions) cfg.log_rho[pos] = std::log(rho);
  }
  const double log_n = std::log(n);
  cfg.log_psi = [](std::size_t, PointView) { return 0.0; };
  cfg.log_psi_sum = [log_n](PointView) { return log_n; };
  cfg.psi_constant = true;
  cfg.evaluations_per_point = 0;
  return cfg;
}

GfConfig gf2_config(const LabeledSample& sample, const JointProposal& joint, const CountsView& counts) {
  GfConfig cfg = gf1_config(counts);
  std::vector<Label> labels(sample.labels().begin(), sample.labels().end());
  std::vector<LabelWeight> terms;
  terms.reserve(counts.groups().size());
  for (const LabelGroup& g : counts.groups())
    terms.push_back({g.label, std::log(static_cast<double>(g.count()))});
  cfg.log_psi = [&joint, labels = std::move(labels)](std::size_t n, PointView x) {
    return joint.log_density(x, labels[n]);
  };
  cfg.log_psi_sum = [&joint, terms = std::move(terms)](PointView x) {
    LogSumExp acc;
    for (const LabelWeight& t : terms) acc.add(t.log_weight + joint.log_density(x, t.label));
    return acc.value();
  };
  cfg.psi_constant = false;
  cfg.evaluations_per_point = counts.groups().size();
  return cfg;
}

GfConfig bh_gf_config(const LabeledSample& sample, const ProposalFamily& family) {
  const CountsView counts = counts_from_sample(sample);
  GfConfig cfg;
  std::vector<Label> labels(sample.labels().begin(), sample.labels().end());
  cfg.log_rho.reserve(labels.size());
  for (Label l : labels) cfg.log_rho.push_back(family.label_log_pmf(l));
  cfg.log_psi = [&family, labels = std::move(labels)](std::size_t n, PointView x) {
    return family.log_component_density(labels[n], x);
  };
  cfg.log_psi_sum = [&family, terms = count_terms(counts)](PointView x) {
    return family.log_weighted_sum(x, terms);
  };
  cfg.evaluations_per_point = counts.groups().size();
  return cfg;
}

EstimateReport z_gf(const LabeledSample& sample, const Target& target, const JointProposal& joint,
                    const GfConfig& cfg) {
  if (sample.empty()) throw std::invalid_argument("z_gf: empty sample");
  if (cfg.log_rho.size() != sample.size())
    throw std::invalid_argument("z_gf: rho must have one entry per sample point");
  LogSumExp acc;
  for (std::size_t n = 0; n < sample.size(); ++n) {
    const auto x = sample.point(n);
    const double lp = target.log_density(x);
    if (lp == kNegInf) continue;
    const double lq = joint.log_density(x, sample.label(n));
    if (lq == kNegInf) throw DomainError("z_gf: qbar(x_n, l_n) = 0 for an emitted pair");
    const double ls = cfg.log_psi_sum(x);
    if (ls == kNegInf) throw DomainError("z_gf: sum_m psi_m(x_n) = 0");
    acc.add(lp + cfg.log_psi(n, x) + cfg.log_rho[n] - lq - ls);
  }
  const auto n = static_cast<std::uint64_t>(sample.size());
  EstimateReport r = make_report(acc.value(), k_eff(counts_from_sample(sample)),
                                 n * (1 + cfg.evaluations_per_point));
  r.diagnostics["normalizer_guaranteed"] = cfg.psi_constant ? 1.0 : 0.0;
  return r;
}

double gf_normalizer_exact(const GfBuilder& builder, const TinyInstance& instance) {
  const ProposalFamily& family = *instance.family;
  const Target& target = *instance.target;
  const std::size_t k = family.num_components();
  const std::size_t n = instance.N;
  if (n == 0 || n > 4 || k > 3 || family.dim() != 1)
    throw InstanceTooLargeError("gf_normalizer_exact: requires N <= 4, K <= 3 and dim = 1");

  const double z = quadrature_z(target, instance.quad);
  std::vector<double> alpha(k);
  for (std::size_t l = 0; l < k; ++l) alpha[l] = std::exp(family.label_log_pmf(static_cast<Label>(l)));

  auto per_labels = [&](std::span<const Label> labels) {
    LabeledSample sample(1, k, std::vector<double>(n, 0.0),
                         std::vector<Label>(labels.begin(), labels.end()));
    const CountsView counts = counts_from_sample(sample);
    const GfConfig cfg = builder(sample, counts);
    auto integrand = [&](double xv) {
      const double x[1] = {xv};
      const double lp = target.log_density(x);
      if (lp == kNegInf) return 0.0;
      const double ls = cfg.log_psi_sum(x);
      double total = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        total += std::exp(lp + cfg.log_psi(m, x) + cfg.log_rho[m] - std::log(alpha[labels[m]]) - ls);
      return total;
    };
    return integrate_1d(integrand, instance.quad) / z;
  };
  return enumerate_label_expectation(per_labels, alpha, n);
}

}  // namespace zest
