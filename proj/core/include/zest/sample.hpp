#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "zest/types.hpp"

namespace zest {

/// Ordered pairs (x_n, l_n), n = 0..N-1, with points stored contiguously.
class LabeledSample {
 public:
  LabeledSample(std::size_t dim, std::size_t num_labels);
  LabeledSample(std::size_t dim, std::size_t num_labels, std::vector<double> coords,
                std::vector<Label> labels);

  void push_back(PointView x, Label l);
  void reserve(std::size_t n);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t dim() const { return dim_; }
  std::size_t num_labels() const { return num_labels_; }

  PointView point(std::size_t n) const { return {coords_.data() + n * dim_, dim_}; }
  PointSpan point(std::size_t n) { return {coords_.data() + n * dim_, dim_}; }
  Label label(std::size_t n) const { return labels_[n]; }

  std::span<const Label> labels() const { return labels_; }
  std::span<const double> coords() const { return coords_; }

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;

 private:
  std::size_t dim_;
  std::size_t num_labels_;
  std::vector<double> coords_;
  std::vector<Label> labels_;
};

/// All sample positions carrying one label, in increasing order.
struct LabelGroup {
  Label label;
  std::vector<std::size_t> positions;

  std::size_t count() const { return positions.size(); }
};

/// Label counts N_i and occurrence positions T_ij of a labeled sample.
///
/// Only labels that occur are stored, so the view costs O(N) memory even when
/// K is in the millions. Groups are sorted by label.
class CountsView {
 public:
  CountsView(std::size_t num_labels, std::size_t total, std::vector<LabelGroup> groups);

  std::size_t num_labels() const { return num_labels_; }
  std::size_t total() const { return total_; }
  std::span<const LabelGroup> groups() const { return groups_; }

  /// N_i; zero for labels that never occur.
  std::size_t count(Label l) const;
  /// T_i1 < T_i2 < ...; empty for labels that never occur.
  std::span<const std::size_t> positions(Label l) const;

 private:
  const LabelGroup* find(Label l) const;

  std::size_t num_labels_;
  std::size_t total_;
  std::vector<LabelGroup> groups_;
};

CountsView counts_from_sample(const LabeledSample& sample);

/// Number of distinct labels present.
std::size_t k_eff(const CountsView& counts);

/// Draws x_i1..x_iN_i of one component.
struct ComponentDraws {
  Label label;
  std::vector<double> coords;

  std::size_t size(std::size_t dim) const { return dim == 0 ? 0 : coords.size() / dim; }
  PointView point(std::size_t j, std::size_t dim) const { return {coords.data() + j * dim, dim}; }
};

/// Per-component lists {x_ij}; components with N_i = 0 are omitted.
struct StratifiedSample {
  std::size_t dim = 1;
  std::size_t num_labels = 1;
  std::vector<ComponentDraws> components;

  std::size_t total() const;
};

/// x_ij = x_{T_ij}: regroups an ordered sample by label.
StratifiedSample group_by_label(const LabeledSample& sample, const CountsView& counts);

/// Inverse of group_by_label: places x_ij back at position T_ij.
LabeledSample ungroup(const StratifiedSample& grouped, const CountsView& counts);

}  // namespace zest
