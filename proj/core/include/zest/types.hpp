#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace zest {

/// Proposal label. Labels are zero-based: a family with K components uses 0..K-1.
using Label = std::uint32_t;

/// Read-only view of one point of a (possibly multi-dimensional) space.
using PointView = std::span<const double>;
/// Writable point storage, used by samplers.
using PointSpan = std::span<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Base class for all numerical contract violations raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A density vanished where the estimator needs it positive (absolute continuity).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A linear system was singular within tolerance.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// An exhaustive oracle was asked to enumerate an instance beyond its bounds.
class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to meet its own accuracy or stability check.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Streaming log-sum-exp. Terms are folded in call order, so the result is a
// deterministic function of the insertion sequence.
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == kNegInf) return;
    if (log_term > max_) {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    } else {
      sum_ += std::exp(log_term - max_);
    }
  }

  double value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

inline double log_sum_exp(std::span<const double> terms) {
  double max = kNegInf;
  for (double t : terms) max = t > max ? t : max;
  if (max == kNegInf) return kNegInf;
  if (max == std::numeric_limits<double>::infinity()) return max;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max);
  return max + std::log(sum);
}

}  // namespace zest
