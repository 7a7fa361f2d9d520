#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "zest/rng.hpp"
#include "zest/sample.hpp"
#include "zest/types.hpp"

namespace zest {

/// Unnormalized target density pi~(x). Its integral Z is the estimand.
class Target {
 public:
  virtual ~Target() = default;

  virtual std::size_t dim() const = 0;
  /// log pi~(x). May be -inf; never +inf or NaN.
  virtual double log_density(PointView x) const = 0;
};

/// One mixture term for `ProposalFamily::log_weighted_sum`.
struct LabelWeight {
  Label label;
  double log_weight;
};

/// Tractable family {q_l} with label distribution alpha: every factor is
/// available separately.
class ProposalFamily {
 public:
  virtual ~ProposalFamily() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t num_components() const = 0;

  virtual double log_component_density(Label l, PointView x) const = 0;
  virtual void sample_component(Label l, RngStream& rng, PointSpan out) const = 0;

  virtual double label_log_pmf(Label l) const = 0;
  virtual Label sample_label(RngStream& rng) const = 0;

  /// log sum_j exp(w_j) * q_{l_j}(x)^exponent.
  /// Costs one component evaluation per term; subclasses may override with a
  /// faster loop but must return the same quantity.
  virtual double log_weighted_sum(PointView x, std::span<const LabelWeight> terms,
                                  double exponent = 1.0) const;

  /// log sum_k alpha(k) q_k(x); costs K component evaluations.
  virtual double log_marginal_density(PointView x) const;
};

/// Joint proposal q(x, l) available only as a sampler plus pointwise joint
/// density. Neither alpha nor q_l can be recovered from this interface.
class JointProposal {
 public:
  virtual ~JointProposal() = default;

  virtual std::size_t dim() const = 0;
  virtual std::size_t num_labels() const = 0;

  /// Writes x into `out` and returns l.
  virtual Label sample(RngStream& rng, PointSpan out) const = 0;
  virtual double log_density(PointView x, Label l) const = 0;
};

/// Views a tractable family as an opaque joint proposal:
/// sample draws L ~ alpha then X | L ~ q_L, and log q(x,l) = log q_l(x) + log alpha(l).
std::shared_ptr<const JointProposal> adapt_tractable_as_joint(
    std::shared_ptr<const ProposalFamily> family);

/// N i.i.d. draws L_n ~ alpha, X_n | L_n ~ q_{L_n}.
LabeledSample draw_labeled_sample(const ProposalFamily& family, std::size_t n, RngStream& rng);

/// N i.i.d. draws (X_n, L_n) ~ q.
LabeledSample draw_joint_sample(const JointProposal& joint, std::size_t n, RngStream& rng);

/// Draws exactly counts[i] points from q_i for each label i (the fixed N_{1:K} setting).
StratifiedSample draw_stratified(const ProposalFamily& family, std::span<const std::size_t> counts,
                                 RngStream& rng);

}  // namespace zest
