#include "zest/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace zest {

EstimateReport make_report(double log_z_hat, std::size_t k_eff, std::uint64_t cost_units) {
  EstimateReport r;
  r.log_z_hat = log_z_hat;
  r.z_hat = std::exp(log_z_hat);
  r.k_eff = k_eff;
  r.cost_units = cost_units;
  return r;
}

WeightFunctionSet::WeightFunctionSet(std::size_t num_labels, LogWeightFn log_omega)
    : num_labels_(num_labels), log_omega_(std::move(log_omega)) {
  if (num_labels == 0) throw std::invalid_argument("WeightFunctionSet: no labels");
}

double WeightFunctionSet::omega(Label i, PointView x) const { return std::exp(log_omega_(i, x)); }

std::vector<LabelCount> label_counts(const CountsView& counts) {
  std::vector<LabelCount> out;
  out.reserve(counts.groups().size());
  for (const auto& g : counts.groups()) out.push_back({g.label, g.count()});
  return out;
}

std::vector<LabelCount> label_counts(const StratifiedSample& sample) {
  std::vector<LabelCount> out;
  out.reserve(sample.components.size());
  for (const auto& c : sample.components)
    if (c.size(sample.dim) > 0) out.push_back({c.label, c.size(sample.dim)});
  return out;
}

std::vector<LabelWeight> count_terms(std::span<const LabelCount> counts) {
  std::vector<LabelWeight> terms;
  terms.reserve(counts.size());
  for (const auto& c : counts)
    if (c.count > 0) terms.push_back({c.label, std::log(static_cast<double>(c.count))});
  return terms;
}

std::vector<LabelWeight> count_terms(const CountsView& counts) {
  return count_terms(label_counts(counts));
}

WeightFunctionSet unit_weights() {
  return WeightFunctionSet(1, [](Label, PointView) { return 0.0; });
}

WeightFunctionSet bh_weights(std::span<const LabelCount> counts, const ProposalFamily& family) {
  std::size_t total = 0;
  std::vector<double> log_n(family.num_components(), kNegInf);
  for (const auto& c : counts) {
    if (c.label >= family.num_components())
      throw std::invalid_argument("bh_weights: label out of range");
    total += c.count;
    if (c.count > 0) log_n[c.label] = std::log(static_cast<double>(c.count));
  }
  if (total == 0) throw std::invalid_argument("bh_weights: counts sum to zero");

  auto terms = count_terms(counts);
  return WeightFunctionSet(
      family.num_components(),
      [&family, terms = std::move(terms), log_n = std::move(log_n)](Label i, PointView x) {
        if (log_n[i] == kNegInf) return kNegInf;
        const double denom = family.log_weighted_sum(x, terms);
        if (denom == kNegInf)
          throw DomainError("bh_weights: sum_k N_k q_k(x) = 0 at an evaluated point");
        return log_n[i] + family.log_component_density(i, x) - denom;
      });
}

WeightFunctionSet rb_weights(const ProposalFamily& family) {
  return WeightFunctionSet(family.num_components(), [&family](Label l, PointView x) {
    const double denom = family.log_marginal_density(x);
    if (denom == kNegInf)
      throw DomainError("rb_weights: sum_k alpha(k) q_k(x) = 0 at an evaluated point");
    return family.label_log_pmf(l) + family.log_component_density(l, x) - denom;
  });
}

EstimateReport z_mis(const StratifiedSample& sample, const WeightFunctionSet& weights,
                     const Target& target, const ProposalFamily& family) {
  if (sample.total() == 0) throw std::invalid_argument("z_mis: empty sample");
  const std::size_t dim = sample.dim;
  LogSumExp acc;
  std::uint64_t cost = 0;
  std::size_t keff = 0;
  for (const ComponentDraws& c : sample.components) {
    const std::size_t n_i = c.size(dim);
    if (n_i == 0) continue;
    ++keff;
    const double log_n_i = std::log(static_cast<double>(n_i));
    for (std::size_t j = 0; j < n_i; ++j) {
      const auto x = c.point(j, dim);
      const double lp = target.log_density(x);
      ++cost;
      if (lp == kNegInf) continue;
      const double lw = weights.log_omega(c.label, x);
      if (lw == kNegInf) continue;
      const double lq = family.log_component_density(c.label, x);
      if (lq == kNegInf)
        throw DomainError("z_mis: q_i(x) = 0 where pi~(x) omega_i(x) > 0 (label " +
                          std::to_string(c.label) + ")");
      acc.add(lw + lp - lq - log_n_i);
    }
  }
  return make_report(acc.value(), keff, cost);
}

EstimateReport z_bh(const LabeledSample& sample, const Target& target, const ProposalFamily& family) {
  if (sample.empty()) throw std::invalid_argument("z_bh: empty sample");
  const CountsView counts = counts_from_sample(sample);
  const auto terms = count_terms(counts);
  LogSumExp acc;
  for (std::size_t n = 0; n < sample.size(); ++n) {
    const auto x = sample.point(n);
    const double lp = target.log_density(x);
    if (lp == kNegInf) continue;
    const double denom = family.log_weighted_sum(x, terms);
    if (denom == kNegInf)
      throw DomainError("z_bh: sum_m q_{l_m}(x_n) = 0 where pi~(x_n) > 0");
    acc.add(lp - denom);
  }
  const std::size_t keff = k_eff(counts);
  return make_report(acc.value(), keff, static_cast<std::uint64_t>(sample.size()) * keff);
}

EstimateReport z_rb(const LabeledSample& sample, const Target& target, const ProposalFamily& family) {
  if (sample.empty()) throw std::invalid_argument("z_rb: empty sample");
  LogSumExp acc;
  for (std::size_t n = 0; n < sample.size(); ++n) {
    const auto x = sample.point(n);
    const double lp = target.log_density(x);
    if (lp == kNegInf) continue;
    const double denom = family.log_marginal_density(x);
    if (denom == kNegInf)
      throw DomainError("z_rb: sum_k alpha(k) q_k(x_n) = 0 where pi~(x_n) > 0");
    acc.add(lp - denom);
  }
  const double log_n = std::log(static_cast<double>(sample.size()));
  return make_report(acc.value() - log_n, k_eff(counts_from_sample(sample)),
                     static_cast<std::uint64_t>(sample.size()) * family.num_components());
}

}  // namespace zest
