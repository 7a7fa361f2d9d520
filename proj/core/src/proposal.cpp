#include "zest/proposal.hpp"

#include <stdexcept>
#include <utility>

namespace zest {

double ProposalFamily::log_weighted_sum(PointView x, std::span<const LabelWeight> terms,
                                        double exponent) const {
  LogSumExp acc;
  for (const LabelWeight& t : terms) {
    const double lq = log_component_density(t.label, x);
    if (lq == kNegInf && exponent == 0.0) {
      acc.add(t.log_weight);
      continue;
    }
    acc.add(t.log_weight + exponent * lq);
  }
  return acc.value();
}

double ProposalFamily::log_marginal_density(PointView x) const {
  LogSumExp acc;
  const std::size_t k = num_components();
  for (std::size_t l = 0; l < k; ++l) {
    const auto label = static_cast<Label>(l);
    acc.add(label_log_pmf(label) + log_component_density(label, x));
  }
  return acc.value();
}

namespace {

class TractableJoint final : public JointProposal {
 public:
  explicit TractableJoint(std::shared_ptr<const ProposalFamily> family) : family_(std::move(family)) {
    if (!family_) throw std::invalid_argument("adapt_tractable_as_joint: null family");
  }

  std::size_t dim() const override { return family_->dim(); }
  std::size_t num_labels() const override { return family_->num_components(); }

  Label sample(RngStream& rng, PointSpan out) const override {
    const Label l = family_->sample_label(rng);
    family_->sample_component(l, rng, out);
    return l;
  }

  double log_density(PointView x, Label l) const override {
    return family_->log_component_density(l, x) + family_->label_log_pmf(l);
  }

 private:
  std::shared_ptr<const ProposalFamily> family_;
};

}  // namespace

std::shared_ptr<const JointProposal> adapt_tractable_as_joint(
    std::shared_ptr<const ProposalFamily> family) {
  return std::make_shared<TractableJoint>(std::move(family));
}

LabeledSample draw_labeled_sample(const ProposalFamily& family, std::size_t n, RngStream& rng) {
  LabeledSample sample(family.dim(), family.num_components());
  sample.reserve(n);
  std::vector<double> x(family.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const Label l = family.sample_label(rng);
    family.sample_component(l, rng, x);
    sample.push_back(x, l);
  }
  return sample;
}

LabeledSample draw_joint_sample(const JointProposal& joint, std::size_t n, RngStream& rng) {
  LabeledSample sample(joint.dim(), joint.num_labels());
  sample.reserve(n);
  std::vector<double> x(joint.dim());
  for (std::size_t i = 0; i < n; ++i) {
    const Label l = joint.sample(rng, x);
    sample.push_back(x, l);
  }
  return sample;
}

StratifiedSample draw_stratified(const ProposalFamily& family, std::span<const std::size_t> counts,
                                 RngStream& rng) {
  if (counts.size() != family.num_components())
    throw std::invalid_argument("draw_stratified: counts must have one entry per component");
  StratifiedSample out;
  out.dim = family.dim();
  out.num_labels = family.num_components();
  std::vector<double> x(family.dim());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    ComponentDraws draws{static_cast<Label>(i), {}};
    draws.coords.reserve(counts[i] * family.dim());
    for (std::size_t j = 0; j < counts[i]; ++j) {
      family.sample_component(draws.label, rng, x);
      draws.coords.insert(draws.coords.end(), x.begin(), x.end());
    }
    out.components.push_back(std::move(draws));
  }
  return out;
}

}  // namespace zest
