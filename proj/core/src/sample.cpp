#include "zest/sample.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace zest {

LabeledSample::LabeledSample(std::size_t dim, std::size_t num_labels)
    : dim_(dim), num_labels_(num_labels) {
  if (dim == 0) throw std::invalid_argument("LabeledSample: dim must be positive");
  if (num_labels == 0) throw std::invalid_argument("LabeledSample: num_labels must be positive");
}

LabeledSample::LabeledSample(std::size_t dim, std::size_t num_labels, std::vector<double> coords,
                             std::vector<Label> labels)
    : LabeledSample(dim, num_labels) {
  if (coords.size() != labels.size() * dim)
    throw std::invalid_argument("LabeledSample: coords size does not match labels * dim");
  for (Label l : labels)
    if (l >= num_labels)
      throw std::invalid_argument("LabeledSample: label " + std::to_string(l) + " out of range");
  coords_ = std::move(coords);
  labels_ = std::move(labels);
}

void LabeledSample::push_back(PointView x, Label l) {
  if (x.size() != dim_) throw std::invalid_argument("LabeledSample: point has wrong dimension");
  if (l >= num_labels_) throw std::invalid_argument("LabeledSample: label out of range");
  coords_.insert(coords_.end(), x.begin(), x.end());
  labels_.push_back(l);
}

void LabeledSample::reserve(std::size_t n) {
  coords_.reserve(n * dim_);
  labels_.reserve(n);
}

CountsView::CountsView(std::size_t num_labels, std::size_t total, std::vector<LabelGroup> groups)
    : num_labels_(num_labels), total_(total), groups_(std::move(groups)) {}

const LabelGroup* CountsView::find(Label l) const {
  auto it = std::lower_bound(groups_.begin(), groups_.end(), l,
                             [](const LabelGroup& g, Label v) { return g.label < v; });
  if (it == groups_.end() || it->label != l) return nullptr;
  return &*it;
}

std::size_t CountsView::count(Label l) const {
  const LabelGroup* g = find(l);
  return g ? g->count() : 0;
}

std::span<const std::size_t> CountsView::positions(Label l) const {
  const LabelGroup* g = find(l);
  if (!g) return {};
  return g->positions;
}

CountsView counts_from_sample(const LabeledSample& sample) {
  const auto labels = sample.labels();
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });

  std::vector<LabelGroup> groups;
  for (std::size_t idx : order) {
    if (groups.empty() || groups.back().label != labels[idx]) groups.push_back({labels[idx], {}});
    groups.back().positions.push_back(idx);
  }
  return CountsView(sample.num_labels(), sample.size(), std::move(groups));
}

std::size_t k_eff(const CountsView& counts) { return counts.groups().size(); }

std::size_t StratifiedSample::total() const {
  std::size_t n = 0;
  for (const auto& c : components) n += c.size(dim);
  return n;
}

StratifiedSample group_by_label(const LabeledSample& sample, const CountsView& counts) {
  StratifiedSample out;
  out.dim = sample.dim();
  out.num_labels = sample.num_labels();
  out.components.reserve(counts.groups().size());
  for (const LabelGroup& g : counts.groups()) {
    ComponentDraws draws{g.label, {}};
    draws.coords.reserve(g.count() * sample.dim());
    for (std::size_t pos : g.positions) {
      const auto x = sample.point(pos);
      draws.coords.insert(draws.coords.end(), x.begin(), x.end());
    }
    out.components.push_back(std::move(draws));
  }
  return out;
}

LabeledSample ungroup(const StratifiedSample& grouped, const CountsView& counts) {
  const std::size_t dim = grouped.dim;
  std::vector<double> coords(counts.total() * dim);
  std::vector<Label> labels(counts.total());
  for (const ComponentDraws& c : grouped.components) {
    const auto positions = counts.positions(c.label);
    if (positions.size() != c.size(dim))
      throw std::invalid_argument("ungroup: component size does not match counts");
    for (std::size_t j = 0; j < positions.size(); ++j) {
      const auto x = c.point(j, dim);
      std::copy(x.begin(), x.end(), coords.begin() + static_cast<std::ptrdiff_t>(positions[j] * dim));
      labels[positions[j]] = c.label;
    }
  }
  return LabeledSample(dim, grouped.num_labels, std::move(coords), std::move(labels));
}

}  // namespace zest
