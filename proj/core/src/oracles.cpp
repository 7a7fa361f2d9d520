#include "zest/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "zest/parallel.hpp"

namespace zest {

double simpson(const std::function<double(double)>& f, const QuadratureSpec& spec) {
  if (!(spec.lower < spec.upper)) throw std::invalid_argument("simpson: lower must be below upper");
  if (spec.points < 3 || spec.points % 2 == 0)
    throw std::invalid_argument("simpson: points must be odd and at least 3");
  const std::size_t intervals = spec.points - 1;
  const double h = (spec.upper - spec.lower) / static_cast<double>(intervals);
  double sum = f(spec.lower) + f(spec.upper);
  for (std::size_t i = 1; i < intervals; ++i) {
    const double x = spec.lower + h * static_cast<double>(i);
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(x);
  }
  return sum * h / 3.0;
}

double integrate_1d(const std::function<double(double)>& f, const QuadratureSpec& spec, double tolerance) {
  const double full = simpson(f, spec);
  QuadratureSpec half = spec;
  half.points = (spec.points - 1) / 2 + 1;
  if (half.points % 2 == 0) ++half.points;
  if (half.points < 3) half.points = 3;
  const double coarse = simpson(f, half);
  const double error = std::abs(full - coarse) / 15.0;
  if (!std::isfinite(full) || error > tolerance * std::max(1.0, std::abs(full)))
    throw NumericalError("quadrature error estimate " + std::to_string(error) + " exceeds tolerance");
  return full;
}

double quadrature_z(const Target& target, const QuadratureSpec& spec) {
  if (target.dim() != 1) throw std::invalid_argument("quadrature_z: one-dimensional targets only");
  return integrate_1d(
      [&](double x) {
        const double p[1] = {x};
        return std::exp(target.log_density(p));
      },
      spec);
}

double simpson_2d_ascending(const std::function<double(double, double)>& f, const QuadratureSpec& spec) {
  auto outer = [&](double x1) {
    if (x1 >= spec.upper) return 0.0;
    QuadratureSpec inner = spec;
    // Strict ordering makes densities vanish on the diagonal itself; start
    // one ulp above it so the first node sees the interior limit.
    inner.lower = std::nextafter(x1, spec.upper);
    return simpson([&](double x2) { return f(x1, x2); }, inner);
  };
  return simpson(outer, spec);
}

std::vector<double> quadrature_tau(const Target& target, const JointProposal& joint,
                                   const QuadratureSpec& spec, std::span<const Label> labels) {
  if (target.dim() != 1 || joint.dim() != 1)
    throw std::invalid_argument("quadrature_tau: one-dimensional instances only");
  const double log_z = std::log(quadrature_z(target, spec));
  std::vector<Label> which(labels.begin(), labels.end());
  if (which.empty())
    for (std::size_t i = 0; i < joint.num_labels(); ++i) which.push_back(static_cast<Label>(i));
  std::vector<double> tau(which.size());
  for (std::size_t j = 0; j < which.size(); ++j) {
    const Label i = which[j];
    tau[j] = integrate_1d(
        [&](double x) {
          const double p[1] = {x};
          const double lp = target.log_density(p);
          if (lp == kNegInf) return 0.0;
          return std::exp(2.0 * (lp - log_z) - joint.log_density(p, i));
        },
        spec);
  }
  return tau;
}

double enumerate_label_expectation(const std::function<double(std::span<const Label>)>& f,
                                   std::span<const double> alpha, std::size_t n) {
  const std::size_t k = alpha.size();
  if (k == 0) throw std::invalid_argument("enumerate_label_expectation: empty alpha");
  double combos = 1.0;
  for (std::size_t i = 0; i < n; ++i) combos *= static_cast<double>(k);
  if (combos > 1e6) throw InstanceTooLargeError("enumerate_label_expectation: K^N exceeds 1e6");

  std::vector<Label> labels(n, 0);
  double total = 0.0;
  for (;;) {
    double weight = 1.0;
    for (Label l : labels) weight *= alpha[l];
    if (weight > 0.0) total += weight * f(labels);
    std::size_t pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) break;
  }
  return total;
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("Matrix: dimension mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k)
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += (*this)(i, k) * rhs(k, j);
  return out;
}

Matrix dense_inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("dense_inverse: matrix must be square");
  Matrix work = a;
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(work(r, col)) > std::abs(work(pivot, col))) pivot = r;
    if (std::abs(work(pivot, col)) < 1e-12) throw SingularSystemError("dense_inverse: singular matrix");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(pivot, j), work(col, j));
        std::swap(inv(pivot, j), inv(col, j));
      }
    }
    const double d = work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = work(r, col);
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= factor * work(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

namespace {

struct Moments {
  std::vector<double> mean;
  std::vector<double> cov;  // d x d, unbiased
};

// Moments of the rows selected by `index` (all rows when empty), on values
// already centered by a fixed shift.
Moments moments(const std::vector<double>& centered, std::size_t dim, std::size_t rows,
                const std::vector<std::size_t>* index) {
  Moments m{std::vector<double>(dim, 0.0), std::vector<double>(dim * dim, 0.0)};
  for (std::size_t r = 0; r < rows; ++r) {
    const double* v = &centered[(index ? (*index)[r] : r) * dim];
    for (std::size_t j = 0; j < dim; ++j) {
      m.mean[j] += v[j];
      for (std::size_t k = j; k < dim; ++k) m.cov[j * dim + k] += v[j] * v[k];
    }
  }
  const double rr = static_cast<double>(rows);
  for (std::size_t j = 0; j < dim; ++j) m.mean[j] /= rr;
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t k = j; k < dim; ++k) {
      const double c = rows > 1 ? (m.cov[j * dim + k] - rr * m.mean[j] * m.mean[k]) / (rr - 1.0) : 0.0;
      m.cov[j * dim + k] = c;
      m.cov[k * dim + j] = c;
    }
  return m;
}

double stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double sample_variance(std::span<const double> xs, const std::vector<std::size_t>* index) {
  const std::size_t n = xs.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += xs[index ? (*index)[i] : i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = xs[index ? (*index)[i] : i] - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(n - 1);
}

void draw_indices(std::vector<std::size_t>& index, std::size_t n, RngStream& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  index.resize(n);
  for (auto& i : index) i = pick(rng);
}

}  // namespace

ReplicationSummary summarize_replicates(std::vector<double> values, std::size_t dim,
                                        std::uint64_t bootstrap_seed, std::size_t resamples) {
  if (dim == 0 || values.size() % dim != 0)
    throw std::invalid_argument("summarize_replicates: values must be R x d");
  const std::size_t rows = values.size() / dim;
  if (rows < 2) throw std::invalid_argument("summarize_replicates: need at least two replicates");

  ReplicationSummary s;
  s.count = rows;
  s.dim = dim;
  s.values = std::move(values);

  // Shift by the first row so accumulated cross products stay well conditioned.
  std::vector<double> centered(s.values.size());
  std::vector<double> shift(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(dim));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t j = 0; j < dim; ++j) centered[r * dim + j] = s.values[r * dim + j] - shift[j];
  {
    const Moments m = moments(centered, dim, rows, nullptr);
    s.mean = m.mean;
    for (std::size_t j = 0; j < dim; ++j) s.mean[j] += shift[j];
    s.covariance = m.cov;
    s.variance.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) s.variance[j] = m.cov[j * dim + j];
  }

  std::vector<std::vector<double>> boot_mean(dim), boot_cov(dim * dim);
  RngStream rng(bootstrap_seed);
  std::vector<std::size_t> index;
  for (std::size_t b = 0; b < resamples; ++b) {
    draw_indices(index, rows, rng);
    const Moments m = moments(centered, dim, rows, &index);
    for (std::size_t j = 0; j < dim; ++j) boot_mean[j].push_back(m.mean[j]);
    for (std::size_t j = 0; j < dim * dim; ++j) boot_cov[j].push_back(m.cov[j]);
  }
  s.se_mean.resize(dim);
  s.se_variance.resize(dim);
  s.se_covariance.resize(dim * dim);
  for (std::size_t j = 0; j < dim; ++j) s.se_mean[j] = stddev(boot_mean[j]);
  for (std::size_t j = 0; j < dim * dim; ++j) s.se_covariance[j] = stddev(boot_cov[j]);
  for (std::size_t j = 0; j < dim; ++j) s.se_variance[j] = s.se_covariance[j * dim + j];
  return s;
}

ReplicationSummary replicate(const ReplicateFn& fn, std::size_t replicates, std::uint64_t seed,
                             std::size_t workers, std::size_t resamples) {
  if (replicates < 2) throw std::invalid_argument("replicate: R must be at least 2");
  const RngStream master(seed);
  std::vector<std::vector<double>> rows(replicates);
  parallel_for(replicates, workers, [&](std::size_t r) {
    RngStream stream = master.substream(r);
    rows[r] = fn(stream, r);
  });
  const std::size_t dim = rows.front().size();
  std::vector<double> flat;
  flat.reserve(replicates * dim);
  for (const auto& row : rows) {
    if (row.size() != dim) throw std::invalid_argument("replicate: inconsistent result length");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return summarize_replicates(std::move(flat), dim, mix64(seed ^ 0xb00757a9ull), resamples);
}

VarianceComparison compare_variances(std::span<const double> a, std::span<const double> b,
                                     std::uint64_t seed, double level, std::size_t resamples) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("compare_variances: need two values each");
  RngStream rng(seed);
  std::vector<std::size_t> ia, ib;
  std::vector<double> diffs;
  diffs.reserve(resamples);
  for (std::size_t r = 0; r < resamples; ++r) {
    draw_indices(ia, a.size(), rng);
    draw_indices(ib, b.size(), rng);
    diffs.push_back(sample_variance(a, &ia) - sample_variance(b, &ib));
  }
  std::sort(diffs.begin(), diffs.end());
  const auto q = static_cast<std::size_t>(std::ceil(level * static_cast<double>(resamples)));
  return {sample_variance(a, nullptr) - sample_variance(b, nullptr),
          diffs[std::min(resamples, std::max<std::size_t>(q, 1)) - 1]};
}

namespace {

// Tempered potential exp(pot(n, x_n; l)) recomputed from raw densities.
double tempered_ratio(const TinyInstance& inst, double x, std::span<const Label> labels, double gamma,
                      Scheme scheme) {
  const double p[1] = {x};
  const double target = std::exp(inst.target->log_density(p));
  double denom = 0.0;
  for (Label l : labels) {
    const double q = std::exp(inst.family->log_component_density(l, p));
    denom += scheme == Scheme::purely_geometric ? q : std::pow(q, gamma);
  }
  if (scheme == Scheme::purely_geometric) return std::pow(target / denom, gamma);
  return std::pow(target, gamma) / denom;
}

}  // namespace

ExtendedDraws rejection_sample_extended(const TinyInstance& inst, double gamma, Scheme scheme,
                                        std::size_t count, RngStream& rng) {
  const ProposalFamily& family = *inst.family;
  const std::size_t k = family.num_components();
  const std::size_t n = inst.N;
  if (n == 0 || n > 2 || k > 2 || family.dim() != 1)
    throw InstanceTooLargeError("rejection_sample_extended: requires N <= 2, K <= 2, dim = 1");
  if (scheme == Scheme::gf_semi_geometric)
    throw std::invalid_argument("rejection_sample_extended: balance-heuristic schemes only");

  // Envelope: supremum over a fine grid, every label vector and every index.
  double sup = 0.0;
  std::vector<Label> labels(n, 0);
  for (;;) {
    const std::size_t grid = 20001;
    const double h = (inst.quad.upper - inst.quad.lower) / static_cast<double>(grid - 1);
    for (std::size_t g = 0; g < grid; ++g)
      sup = std::max(sup, tempered_ratio(inst, inst.quad.lower + h * static_cast<double>(g), labels, gamma, scheme));
    std::size_t pos = 0;
    while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
    if (pos == n) break;
  }
  const double bound = 1.05 * sup;

  ExtendedDraws out;
  out.draws.reserve(count);
  std::size_t attempts = 0;
  std::vector<double> x(n);
  std::vector<double> point(1);
  while (out.draws.size() < count) {
    ++attempts;
    const auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    for (std::size_t m = 0; m < n; ++m) {
      labels[m] = family.sample_label(rng);
      family.sample_component(labels[m], rng, point);
      x[m] = point[0];
    }
    const double ratio = tempered_ratio(inst, x[idx], labels, gamma, scheme);
    if (ratio > bound) throw NumericalError("rejection_sample_extended: envelope violated");
    if (rng.uniform() * bound < ratio) out.draws.push_back({std::min(idx, n - 1), x, labels});
  }
  out.acceptance_rate = static_cast<double>(count) / static_cast<double>(attempts);
  return out;
}

}  // namespace zest
