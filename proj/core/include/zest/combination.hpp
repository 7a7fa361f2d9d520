#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "zest/estimators.hpp"
#include "zest/proposal.hpp"
#include "zest/sample.hpp"

namespace zest {

// Estimators that only see an opaque JointProposal: the label-marginal alpha
// and the conditionals q_l are never evaluated separately here.

enum class BetaKind { uniform, optimal, custom };

/// Auxiliary label distribution beta_x(l), one per point x.
struct BetaPolicy {
  BetaKind kind = BetaKind::custom;
  std::function<double(PointView, Label)> log_beta;
  /// Joint-density evaluations spent per call of log_beta.
  std::uint64_t evaluations_per_point = 0;
};

/// beta_x(l) = 1/K.
BetaPolicy beta_uniform(std::size_t num_labels);

/// beta_x(l) = qbar(x,l) / sum_k qbar(x,k). Keeps a reference to `joint`.
/// Throws DomainError where the sum vanishes.
BetaPolicy beta_opt(const JointProposal& joint);

/// (1/N) sum_n pi~(x_n) beta_{x_n}(l_n) / qbar(x_n, l_n).
EstimateReport z_beta(const LabeledSample& sample, const Target& target, const JointProposal& joint,
                      const BetaPolicy& policy);

/// Zhat_i = (1/N) sum_{j <= N_i} pi~(x_ij) / qbar(x_ij, i), dense over all K
/// labels. Labels that never occur get exactly 0.
std::vector<double> z_i_per_label(const LabeledSample& sample, const Target& target,
                                  const JointProposal& joint);

struct TauVector {
  std::vector<double> values;
};

/// v -> (T - 11^T)^{-1} v with T = diag(tau), via the rank-one update
/// (T - 11^T)^{-1} = T^{-1} + T^{-1} 1 1^T T^{-1} / (1 - 1^T T^{-1} 1).
class SigmaInverse {
 public:
  /// Throws SingularSystemError when |1 - sum_i 1/tau_i| < 1e-12.
  explicit SigmaInverse(TauVector tau);

  std::vector<double> apply(std::span<const double> v) const;
  std::size_t size() const { return inv_tau_.size(); }
  /// 1 - sum_i 1/tau_i.
  double denominator() const { return denom_; }

 private:
  std::vector<double> inv_tau_;
  double denom_;
};

SigmaInverse sigma_inverse_action(const TauVector& tau);

struct WeightSimplex {
  std::vector<double> nu;
  std::vector<bool> negative;

  bool any_negative() const;
};

/// nu = Sigma^{-1} 1 / (1^T Sigma^{-1} 1), unconstrained. Negative entries are
/// flagged, not clipped.
WeightSimplex optimal_weights(const TauVector& tau);

/// Euclidean projection of v onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

/// Self-normalized tau_hat_i = N (sum W)^{-2} sum_n W_n pi~(x_n)/qbar(x_n, i)
/// with W_n = pi~(x_n) / (K qbar(x_n, l_n)). Costs N*K joint evaluations.
TauVector tau_hat(const LabeledSample& sample, const Target& target, const JointProposal& joint);

/// sum_i nu_i Zhat_i with nu from tau_hat, restricted to labels that occur and
/// renormalized over them. Diagnostics:
///   z_full_support    estimate using the unrestricted nu
///   negative_weights  number of negative nu entries on the support
///   singular_fallback 1 if Sigma was singular and uniform weights were used
///   support_mass      sum of unrestricted nu over the support
EstimateReport z_comb(const LabeledSample& sample, const Target& target, const JointProposal& joint);

/// Surrogates psi_n and label weights rho_n for the general-framework estimator.
/// psi may depend on l_{1:N} (captured at construction) but only on the
/// evaluation point otherwise.
struct GfConfig {
  std::function<double(std::size_t, PointView)> log_psi;
  /// log sum_m psi_m(x).
  std::function<double(PointView)> log_psi_sum;
  std::vector<double> log_rho;
  /// True when psi is constant, which guarantees a unit normalizer.
  bool psi_constant = false;
  std::uint64_t evaluations_per_point = 0;
};

using GfBuilder = std::function<GfConfig(const LabeledSample&, const CountsView&)>;

/// psi = 1, rho_n = (1/K - 1 + N_{l_n}) / N.
GfConfig gf1_config(const CountsView& counts);

/// psi_n(x) = qbar(x, l_n), rho_n as gf1. Keeps a reference to `joint`.
GfConfig gf2_config(const LabeledSample& sample, const JointProposal& joint, const CountsView& counts);

/// psi_n = q_{l_n}, rho_n = alpha(l_n): recovers the balance heuristic.
/// Keeps a reference to `family`.
GfConfig bh_gf_config(const LabeledSample& sample, const ProposalFamily& family);

/// sum_n pi~(x_n) psi_n(x_n) rho_n / (qbar(x_n, l_n) sum_m psi_m(x_n)).
EstimateReport z_gf(const LabeledSample& sample, const Target& target, const JointProposal& joint,
                    const GfConfig& cfg);

struct TinyInstance;

/// Exact normalizer of the general-framework extended target,
/// E_{L ~ alpha^N, X ~ pi}[ sum_n psi_n(X) (rho_n / alpha(L_n)) / sum_m psi_m(X) ],
/// by enumerating all K^N label vectors and integrating X by quadrature.
/// Requires N <= 4, K <= 3, dim = 1; otherwise throws InstanceTooLargeError.
double gf_normalizer_exact(const GfBuilder& builder, const TinyInstance& instance);

}  // namespace zest
