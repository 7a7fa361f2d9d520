#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "zest/proposal.hpp"
#include "zest/sample.hpp"

namespace zest {

/// Result of one estimator run.
struct EstimateReport {
  double z_hat = 0.0;          // linear scale; +inf if exp(log_z_hat) overflows
  double log_z_hat = kNegInf;  // always available
  std::size_t k_eff = 0;
  std::uint64_t cost_units = 0;  // component-density evaluations
  std::map<std::string, double> diagnostics;
};

/// Fills z_hat from a log-scale estimate.
EstimateReport make_report(double log_z_hat, std::size_t k_eff, std::uint64_t cost_units);

/// Partition of unity {omega_i} over the K labels, stored in log space.
class WeightFunctionSet {
 public:
  using LogWeightFn = std::function<double(Label, PointView)>;

  WeightFunctionSet(std::size_t num_labels, LogWeightFn log_omega);

  std::size_t num_labels() const { return num_labels_; }
  double log_omega(Label i, PointView x) const { return log_omega_(i, x); }
  double omega(Label i, PointView x) const;

 private:
  std::size_t num_labels_;
  LogWeightFn log_omega_;
};

/// (label, N_label) pair for labels with N_label > 0.
struct LabelCount {
  Label label;
  std::size_t count;
};

std::vector<LabelCount> label_counts(const CountsView& counts);
std::vector<LabelCount> label_counts(const StratifiedSample& sample);

/// Terms log N_l for `ProposalFamily::log_weighted_sum`.
std::vector<LabelWeight> count_terms(std::span<const LabelCount> counts);
std::vector<LabelWeight> count_terms(const CountsView& counts);

/// omega_i = 1 for every i; only valid for K = 1.
WeightFunctionSet unit_weights();

/// Balance heuristic weights omega_i(x) = N_i q_i(x) / sum_k N_k q_k(x).
/// The denominator runs over labels with N_k > 0 only. Evaluating at an x
/// where the denominator vanishes throws DomainError.
WeightFunctionSet bh_weights(std::span<const LabelCount> counts, const ProposalFamily& family);

/// omega_l(x) = alpha(l) q_l(x) / sum_k alpha(k) q_k(x).
WeightFunctionSet rb_weights(const ProposalFamily& family);

/// Generic multiple importance sampling estimate
/// sum_i (1/N_i) sum_j omega_i(x_ij) pi~(x_ij) / q_i(x_ij).
EstimateReport z_mis(const StratifiedSample& sample, const WeightFunctionSet& weights,
                     const Target& target, const ProposalFamily& family);

/// Balance heuristic sum_n pi~(x_n) / sum_m q_{l_m}(x_n), with the denominator
/// grouped by distinct label so the cost is N * K_eff.
EstimateReport z_bh(const LabeledSample& sample, const Target& target, const ProposalFamily& family);

/// Rao-Blackwellized (1/N) sum_n pi~(x_n) / sum_k alpha(k) q_k(x_n); cost N * K.
EstimateReport z_rb(const LabeledSample& sample, const Target& target, const ProposalFamily& family);

}  // namespace zest
