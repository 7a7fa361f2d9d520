#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "zest/combination.hpp"
#include "zest/estimators.hpp"
#include "zest/proposal.hpp"
#include "zest/rng.hpp"
#include "zest/sample.hpp"

namespace zest {

/// gamma_0 = 0 < gamma_1 < ... < gamma_T = 1. T counts transitions, so a
/// schedule with T transitions has T + 1 points.
class AnnealingSchedule {
 public:
  explicit AnnealingSchedule(std::vector<double> gammas);

  std::size_t transitions() const { return gammas_.size() - 1; }
  double operator[](std::size_t t) const { return gammas_[t]; }
  std::span<const double> gammas() const { return gammas_; }

 private:
  std::vector<double> gammas_;
};

/// gamma_t = t / T.
AnnealingSchedule linear_schedule(std::size_t transitions);

enum class Scheme { purely_geometric, semi_geometric, gf_semi_geometric };
enum class KernelKind { mh_random_walk, collapsed_gibbs };

std::string_view to_string(Scheme scheme);
std::string_view to_string(KernelKind kind);
Scheme scheme_from_string(std::string_view name);
KernelKind kernel_from_string(std::string_view name);

struct KernelConfig {
  KernelKind kind = KernelKind::mh_random_walk;
  std::size_t mh_steps = 10;
  double mh_step_std = 1.0;
  std::size_t gibbs_sweeps = 1;
};

/// Per-index log potential of the tempered balance-heuristic target, relative
/// to qbar^{(x)N}:
///   purely geometric: gamma * (log pi~(x) - log sum_m q_{l_m}(x))
///   semi geometric:   gamma * log pi~(x) - log sum_m q_{l_m}(x)^gamma
/// `count_terms` holds log N_l for the labels present.
double log_potential_bh(Scheme scheme, PointView x, std::span<const LabelWeight> count_terms,
                        double gamma, const ProposalFamily& family, const Target& target);

/// Random-walk Metropolis on one point with isotropic Gaussian increments.
/// Updates `state` in place and returns the acceptance rate.
using LogDensityFn = std::function<double(PointView)>;
double mh_kernel(PointSpan state, const LogDensityFn& log_target, std::size_t steps, double step_std,
                 RngStream& rng);

/// Particles theta = (x_{1:N}, l_{1:N}); labels are never modified.
struct ParticleSystem {
  LabeledSample particles;
  std::vector<double> log_potentials;  // potential of each index at the current temperature
};

/// Draws n* with probability proportional to exp(log_potentials[n]) and redraws
/// every other particle from its own component. Returns n*.
std::size_t collapsed_gibbs_move(LabeledSample& particles, std::span<const double> log_potentials,
                                 const ProposalFamily& family, RngStream& rng);

struct AisOptions {
  AnnealingSchedule schedule = linear_schedule(21);
  Scheme scheme = Scheme::semi_geometric;
  KernelConfig kernel;
  std::size_t workers = 1;
};

/// Standard annealed importance sampling on the extended balance-heuristic
/// target. The kernel at temperature t leaves eta_t invariant: it draws n*
/// from its conditional and then either refreshes the other particles
/// (collapsed Gibbs) or runs Metropolis on every particle against its
/// conditional given n*.
EstimateReport ais_standard(std::size_t n, const AisOptions& opts, const ProposalFamily& family,
                            const Target& target, RngStream& rng);
EstimateReport ais_standard(const LabeledSample& initial, const AisOptions& opts,
                            const ProposalFamily& family, const Target& target, RngStream& rng);

/// Modified annealed importance sampling: every particle carries its own
/// weight chain and moves independently, targeting
/// exp(potential_t(x)) * q_{l_n}(x). Only the Metropolis kernel is valid here.
EstimateReport ais_modified(std::size_t n, const AisOptions& opts, const ProposalFamily& family,
                            const Target& target, RngStream& rng);
EstimateReport ais_modified(const LabeledSample& initial, const AisOptions& opts,
                            const ProposalFamily& family, const Target& target, RngStream& rng);

/// Log potential of particle n in the annealed general-framework target:
/// gamma * [log pi~ + log psi_n + log rho_n - log qbar(x, l_n)] - log sum_m psi_m.
/// The psi-sum is kept at the terminal exponent 1 at every temperature.
double log_potential_gf(std::size_t n, PointView x, Label label, double gamma, const GfConfig& cfg,
                        const JointProposal& joint, const Target& target);

/// Modified annealing of the general-framework target. Particles start from
/// the joint proposal; `builder` forms the surrogates from the initial sample.
EstimateReport ais_gf_modified(std::size_t n, const AisOptions& opts, const GfBuilder& builder,
                               const JointProposal& joint, const Target& target, RngStream& rng);
EstimateReport ais_gf_modified(const LabeledSample& initial, const AisOptions& opts,
                               const GfBuilder& builder, const JointProposal& joint,
                               const Target& target, RngStream& rng);

}  // namespace zest
