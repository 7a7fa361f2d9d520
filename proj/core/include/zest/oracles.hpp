#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "zest/annealing.hpp"
#include "zest/proposal.hpp"
#include "zest/rng.hpp"

// Reference machinery for tests. Nothing here calls into the estimator,
// combination or annealing code paths; each quantity is recomputed from the
// raw densities.

namespace zest {

/// Composite Simpson rule on [lower, upper] with an odd number of nodes.
struct QuadratureSpec {
  double lower = -12.0;
  double upper = 12.0;
  std::size_t points = 4001;
};

double simpson(const std::function<double(double)>& f, const QuadratureSpec& spec);

/// Simpson value plus |full - half-resolution| as an error estimate. Throws
/// NumericalError when the estimate exceeds `tolerance` relative to max(1, |value|).
double integrate_1d(const std::function<double(double)>& f, const QuadratureSpec& spec,
                    double tolerance = 1e-8);

/// Z = integral of pi~ for a one-dimensional target.
double quadrature_z(const Target& target, const QuadratureSpec& spec = {});

/// Integral of f(x1, x2) over the ascending region x1 < x2 within the box,
/// by nested Simpson.
double simpson_2d_ascending(const std::function<double(double, double)>& f, const QuadratureSpec& spec);

/// tau_i = E_pi[ pi(X) / qbar(X, i) ] by quadrature, for the given labels
/// (every label when `labels` is empty), in the order given.
std::vector<double> quadrature_tau(const Target& target, const JointProposal& joint,
                                   const QuadratureSpec& spec = {}, std::span<const Label> labels = {});

/// sum over l in [0,K)^N of f(l) prod_n alpha(l_n). K = alpha.size().
/// Throws InstanceTooLargeError when K^N > 1e6.
double enumerate_label_expectation(const std::function<double(std::span<const Label>)>& f,
                                   std::span<const double> alpha, std::size_t n);

/// Small dense row-major matrix.
class Matrix {
 public:
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  Matrix operator*(const Matrix& rhs) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Gauss-Jordan elimination with partial pivoting. Throws SingularSystemError
/// when a pivot falls below 1e-12 in absolute value.
Matrix dense_inverse(const Matrix& a);

/// Statistics of R replicate vectors of length d.
struct ReplicationSummary {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // R x d, row-major
  std::vector<double> mean;
  std::vector<double> variance;    // unbiased
  std::vector<double> covariance;  // d x d, unbiased
  std::vector<double> se_mean;     // bootstrap
  std::vector<double> se_variance; // bootstrap
  std::vector<double> se_covariance;

  double value(std::size_t r, std::size_t j) const { return values[r * dim + j]; }
};

/// Summarizes precomputed replicate values with `resamples` bootstrap draws.
ReplicationSummary summarize_replicates(std::vector<double> values, std::size_t dim,
                                        std::uint64_t bootstrap_seed, std::size_t resamples = 1000);

using ReplicateFn = std::function<std::vector<double>(RngStream&, std::size_t)>;

/// Runs fn on substream r of the master stream for r = 0..R-1.
ReplicationSummary replicate(const ReplicateFn& fn, std::size_t replicates, std::uint64_t seed,
                             std::size_t workers = 1, std::size_t resamples = 1000);

struct VarianceComparison {
  double difference;   // var(a) - var(b)
  double upper_bound;  // one-sided bootstrap quantile at `level`
};

/// Bootstrap distribution of var(a) - var(b) for independent samples a and b.
VarianceComparison compare_variances(std::span<const double> a, std::span<const double> b,
                                     std::uint64_t seed, double level = 0.95,
                                     std::size_t resamples = 1000);

/// Tiny instance for exhaustive and exact-sampling oracles.
struct TinyInstance {
  std::shared_ptr<const Target> target;
  std::shared_ptr<const ProposalFamily> family;
  std::size_t N = 2;
  QuadratureSpec quad;
};

/// One draw (n, x_{1:N}, l_{1:N}) from the tempered balance-heuristic target.
struct ExtendedDraw {
  std::size_t n;
  std::vector<double> x;
  std::vector<Label> labels;
};

struct ExtendedDraws {
  std::vector<ExtendedDraw> draws;
  double acceptance_rate = 0.0;
};

/// Exact draws from the tempered extended target at exponent gamma, by
/// rejection from alpha^N q^N times a uniform index. The envelope is the grid
/// supremum of the potential plus 5% slack; a draw exceeding it throws
/// NumericalError. Requires N <= 2, K <= 2, dim = 1 and a non-GF scheme.
ExtendedDraws rejection_sample_extended(const TinyInstance& instance, double gamma, Scheme scheme,
                                        std::size_t count, RngStream& rng);

}  // namespace zest
