#include "zest/annealing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "zest/parallel.hpp"

namespace zest {

AnnealingSchedule::AnnealingSchedule(std::vector<double> gammas) : gammas_(std::move(gammas)) {
  if (gammas_.size() < 2) throw std::invalid_argument("AnnealingSchedule: need at least two points");
  if (gammas_.front() != 0.0 || gammas_.back() != 1.0)
    throw std::invalid_argument("AnnealingSchedule: endpoints must be exactly 0 and 1");
  for (std::size_t t = 1; t < gammas_.size(); ++t)
    if (!(gammas_[t] > gammas_[t - 1]))
      throw std::invalid_argument("AnnealingSchedule: gammas must be strictly increasing");
}

AnnealingSchedule linear_schedule(std::size_t transitions) {
  if (transitions < 1) throw std::invalid_argument("linear_schedule: T must be at least 1");
  std::vector<double> g(transitions + 1);
  for (std::size_t t = 0; t <= transitions; ++t)
    g[t] = static_cast<double>(t) / static_cast<double>(transitions);
  g.back() = 1.0;
  return AnnealingSchedule(std::move(g));
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::purely_geometric: return "purely_geometric";
    case Scheme::semi_geometric: return "semi_geometric";
    case Scheme::gf_semi_geometric: return "gf_semi_geometric";
  }
  return "unknown";
}

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::mh_random_walk: return "mh_random_walk";
    case KernelKind::collapsed_gibbs: return "collapsed_gibbs";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "purely_geometric" || name == "pg") return Scheme::purely_geometric;
  if (name == "semi_geometric" || name == "sg") return Scheme::semi_geometric;
  if (name == "gf_semi_geometric" || name == "gf_sg") return Scheme::gf_semi_geometric;
  throw std::invalid_argument("unknown annealing scheme '" + std::string(name) + "'");
}

KernelKind kernel_from_string(std::string_view name) {
  if (name == "mh_random_walk" || name == "mh") return KernelKind::mh_random_walk;
  if (name == "collapsed_gibbs" || name == "gibbs") return KernelKind::collapsed_gibbs;
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

double log_potential_bh(Scheme scheme, PointView x, std::span<const LabelWeight> count_terms,
                        double gamma, const ProposalFamily& family, const Target& target) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("log_potential_bh: gamma outside [0,1]");
  switch (scheme) {
    case Scheme::purely_geometric: {
      if (gamma == 0.0) return 0.0;
      const double lp = target.log_density(x);
      if (lp == kNegInf) return kNegInf;
      const double denom = family.log_weighted_sum(x, count_terms);
      if (denom == kNegInf) throw DomainError("log_potential_bh: sum_m q_{l_m}(x) = 0 where pi~(x) > 0");
      return gamma * (lp - denom);
    }
    case Scheme::semi_geometric: {
      const double denom = family.log_weighted_sum(x, count_terms, gamma);
      if (gamma == 0.0) return -denom;
      const double lp = target.log_density(x);
      if (lp == kNegInf) return kNegInf;
      if (denom == kNegInf) throw DomainError("log_potential_bh: sum_m q_{l_m}(x)^gamma = 0 where pi~(x) > 0");
      return gamma * lp - denom;
    }
    case Scheme::gf_semi_geometric:
      break;
  }
  throw std::invalid_argument("log_potential_bh: the general-framework scheme has its own potential");
}

namespace {

void check_kernel(const KernelConfig& k) {
  if (k.mh_steps < 1) throw std::invalid_argument("kernel: mh_steps must be at least 1");
  if (!(k.mh_step_std > 0.0)) throw std::invalid_argument("kernel: mh_step_std must be positive");
  if (k.gibbs_sweeps < 1) throw std::invalid_argument("kernel: gibbs_sweeps must be at least 1");
}

struct Evaluated {
  double log_target;  // what Metropolis compares
  double potential;   // carried along for the weight update
};

// Random-walk Metropolis that also tracks the potential of the current state.
template <class Eval>
std::size_t metropolis(PointSpan state, Evaluated& current, const Eval& eval, std::size_t steps,
                       double step_std, RngStream& rng, std::vector<double>& buffer) {
  buffer.resize(state.size());
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t d = 0; d < state.size(); ++d) buffer[d] = state[d] + step_std * rng.normal();
    const double log_u = std::log(rng.uniform());
    const Evaluated proposal = eval(PointView(buffer));
    if (proposal.log_target == kNegInf) continue;
    if (current.log_target == kNegInf || log_u < proposal.log_target - current.log_target) {
      std::copy(buffer.begin(), buffer.end(), state.begin());
      current = proposal;
      ++accepted;
    }
  }
  return accepted;
}

std::size_t sample_index(std::span<const double> log_w, RngStream& rng) {
  double max = kNegInf;
  for (double v : log_w) max = std::max(max, v);
  if (max == kNegInf) throw NumericalError("all tempered potentials are -inf; cannot select an index");
  double total = 0.0;
  for (double v : log_w) total += std::exp(v - max);
  const double u = rng.uniform() * total;
  double cum = 0.0;
  for (std::size_t n = 0; n < log_w.size(); ++n) {
    cum += std::exp(log_w[n] - max);
    if (u < cum) return n;
  }
  // Rounding can leave u just above the final partial sum.
  for (std::size_t n = log_w.size(); n-- > 0;)
    if (log_w[n] != kNegInf) return n;
  return 0;
}

void check_finite_weight(double log_w, const char* where) {
  if (std::isnan(log_w) || log_w == std::numeric_limits<double>::infinity())
    throw NumericalError(std::string(where) + ": non-finite weight increment");
}

}  // namespace

double mh_kernel(PointSpan state, const LogDensityFn& log_target, std::size_t steps, double step_std,
                 RngStream& rng) {
  if (steps < 1) throw std::invalid_argument("mh_kernel: steps must be at least 1");
  if (!(step_std > 0.0)) throw std::invalid_argument("mh_kernel: step_std must be positive");
  Evaluated current{log_target(PointView(state.data(), state.size())), 0.0};
  std::vector<double> buffer;
  const auto eval = [&](PointView x) { return Evaluated{log_target(x), 0.0}; };
  const std::size_t accepted = metropolis(state, current, eval, steps, step_std, rng, buffer);
  return static_cast<double>(accepted) / static_cast<double>(steps);
}

std::size_t collapsed_gibbs_move(LabeledSample& particles, std::span<const double> log_potentials,
                                 const ProposalFamily& family, RngStream& rng) {
  if (log_potentials.size() != particles.size())
    throw std::invalid_argument("collapsed_gibbs_move: one potential per particle required");
  const std::size_t chosen = sample_index(log_potentials, rng);
  for (std::size_t m = 0; m < particles.size(); ++m) {
    if (m == chosen) continue;
    family.sample_component(particles.label(m), rng, particles.point(m));
  }
  return chosen;
}

EstimateReport ais_standard(std::size_t n, const AisOptions& opts, const ProposalFamily& family,
                            const Target& target, RngStream& rng) {
  RngStream init = rng.substream(0);
  return ais_standard(draw_labeled_sample(family, n, init), opts, family, target, rng);
}

EstimateReport ais_standard(const LabeledSample& initial, const AisOptions& opts,
                            const ProposalFamily& family, const Target& target, RngStream& rng) {
  if (initial.empty()) throw std::invalid_argument("ais_standard: no particles");
  if (opts.scheme == Scheme::gf_semi_geometric)
    throw std::invalid_argument("ais_standard: the general-framework scheme needs ais_gf_modified");
  check_kernel(opts.kernel);

  ParticleSystem sys{initial, {}};
  const std::size_t n = sys.particles.size();
  const std::size_t transitions = opts.schedule.transitions();
  const auto terms = count_terms(counts_from_sample(sys.particles));
  const std::uint64_t keff = terms.size();
  std::uint64_t cost = 0;

  auto potentials = [&](double gamma, std::vector<double>& out) {
    out.resize(n);
    for (std::size_t m = 0; m < n; ++m)
      out[m] = log_potential_bh(opts.scheme, sys.particles.point(m), terms, gamma, family, target);
    cost += n * keff;
  };

  potentials(opts.schedule[1], sys.log_potentials);
  double log_w = log_sum_exp(sys.log_potentials);
  check_finite_weight(log_w, "ais_standard");

  std::vector<double> next;
  std::vector<double> buffer;
  double accepted = 0.0;
  double proposed = 0.0;
  for (std::size_t t = 1; t < transitions; ++t) {
    const double gamma = opts.schedule[t];
    RngStream step = rng.substream(1).substream(t);
    if (opts.kernel.kind == KernelKind::collapsed_gibbs) {
      for (std::size_t sweep = 0; sweep < opts.kernel.gibbs_sweeps; ++sweep) {
        collapsed_gibbs_move(sys.particles, sys.log_potentials, family, step);
        cost += n - 1;
        potentials(gamma, sys.log_potentials);
      }
    } else {
      const std::size_t chosen = sample_index(sys.log_potentials, step);
      for (std::size_t m = 0; m < n; ++m) {
        RngStream move = rng.substream(2).substream(t).substream(m);
        const Label l = sys.particles.label(m);
        const bool tempered = m == chosen;
        auto eval = [&](PointView x) {
          const double lq = family.log_component_density(l, x);
          const double pot =
              tempered ? log_potential_bh(opts.scheme, x, terms, gamma, family, target) : 0.0;
          return Evaluated{lq + pot, pot};
        };
        PointSpan x = sys.particles.point(m);
        Evaluated current = eval(PointView(x.data(), x.size()));
        accepted += static_cast<double>(
            metropolis(x, current, eval, opts.kernel.mh_steps, opts.kernel.mh_step_std, move, buffer));
        proposed += static_cast<double>(opts.kernel.mh_steps);
        cost += (opts.kernel.mh_steps + 1) * (tempered ? keff + 1 : 1);
      }
      potentials(gamma, sys.log_potentials);
    }
    potentials(opts.schedule[t + 1], next);
    log_w += log_sum_exp(next) - log_sum_exp(sys.log_potentials);
    check_finite_weight(log_w, "ais_standard");
    sys.log_potentials.swap(next);
  }

  EstimateReport r = make_report(log_w, keff, cost);
  if (proposed > 0.0) r.diagnostics["acceptance_rate"] = accepted / proposed;
  return r;
}

namespace {

struct ChainResult {
  double log_w = kNegInf;
  std::uint64_t cost = 0;
  std::size_t accepted = 0;
};

// Runs the independent per-particle chains of the modified algorithm.
// `pot(n, x, gamma)` is the particle potential and `base(n, x)` the log
// density the potential is relative to.
template <class Pot, class Base>
EstimateReport run_modified(const LabeledSample& initial, const AisOptions& opts, std::size_t keff,
                            std::uint64_t cost_per_pot, const Pot& pot, const Base& base,
                            RngStream& rng, const char* name) {
  check_kernel(opts.kernel);
  if (opts.kernel.kind != KernelKind::mh_random_walk)
    throw std::invalid_argument(std::string(name) + ": only the mh_random_walk kernel is supported");

  const std::size_t n = initial.size();
  const std::size_t transitions = opts.schedule.transitions();
  std::vector<ChainResult> chains(n);

  parallel_for(n, opts.workers, [&](std::size_t i) {
    ChainResult& res = chains[i];
    std::vector<double> x(initial.point(i).begin(), initial.point(i).end());
    std::vector<double> buffer;
    double current_pot = pot(i, PointView(x), opts.schedule[1]);
    res.cost += cost_per_pot;
    double log_w = current_pot;
    const RngStream particle = rng.substream(1).substream(i);
    for (std::size_t t = 1; t < transitions; ++t) {
      const double gamma = opts.schedule[t];
      RngStream move = particle.substream(t);
      auto eval = [&](PointView y) {
        const double p = pot(i, y, gamma);
        return Evaluated{base(i, y) + p, p};
      };
      Evaluated current{base(i, PointView(x)) + current_pot, current_pot};
      res.accepted +=
          metropolis(PointSpan(x), current, eval, opts.kernel.mh_steps, opts.kernel.mh_step_std, move, buffer);
      const double next_pot = pot(i, PointView(x), opts.schedule[t + 1]);
      res.cost += 1 + opts.kernel.mh_steps * (cost_per_pot + 1) + cost_per_pot;
      log_w += next_pot - current.potential;
      current_pot = next_pot;
    }
    check_finite_weight(log_w, name);
    res.log_w = log_w;
  });

  LogSumExp total;
  std::uint64_t cost = 0;
  std::size_t accepted = 0;
  for (const ChainResult& c : chains) {
    total.add(c.log_w);
    cost += c.cost;
    accepted += c.accepted;
  }
  EstimateReport r = make_report(total.value(), keff, cost);
  if (transitions > 1)
    r.diagnostics["acceptance_rate"] =
        static_cast<double>(accepted) /
        static_cast<double>(n * (transitions - 1) * opts.kernel.mh_steps);
  return r;
}

}  // namespace

EstimateReport ais_modified(std::size_t n, const AisOptions& opts, const ProposalFamily& family,
                            const Target& target, RngStream& rng) {
  RngStream init = rng.substream(0);
  return ais_modified(draw_labeled_sample(family, n, init), opts, family, target, rng);
}

EstimateReport ais_modified(const LabeledSample& initial, const AisOptions& opts,
                            const ProposalFamily& family, const Target& target, RngStream& rng) {
  if (initial.empty()) throw std::invalid_argument("ais_modified: no particles");
  if (opts.scheme == Scheme::gf_semi_geometric)
    throw std::invalid_argument("ais_modified: the general-framework scheme needs ais_gf_modified");
  const auto terms = count_terms(counts_from_sample(initial));
  auto pot = [&](std::size_t, PointView x, double gamma) {
    return log_potential_bh(opts.scheme, x, terms, gamma, family, target);
  };
  auto base = [&](std::size_t i, PointView x) {
    return family.log_component_density(initial.label(i), x);
  };
  return run_modified(initial, opts, terms.size(), terms.size(), pot, base, rng, "ais_modified");
}

double log_potential_gf(std::size_t n, PointView x, Label label, double gamma, const GfConfig& cfg,
                        const JointProposal& joint, const Target& target) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("log_potential_gf: gamma outside [0,1]");
  const double ls = cfg.log_psi_sum(x);
  if (gamma == 0.0) return -ls;
  const double lp = target.log_density(x);
  if (lp == kNegInf) return kNegInf;
  if (ls == kNegInf) throw DomainError("log_potential_gf: sum_m psi_m(x) = 0 where pi~(x) > 0");
  const double lq = joint.log_density(x, label);
  if (lq == kNegInf) return kNegInf;
  return gamma * (lp + cfg.log_psi(n, x) + cfg.log_rho[n] - lq) - ls;
}

EstimateReport ais_gf_modified(std::size_t n, const AisOptions& opts, const GfBuilder& builder,
                               const JointProposal& joint, const Target& target, RngStream& rng) {
  RngStream init = rng.substream(0);
  return ais_gf_modified(draw_joint_sample(joint, n, init), opts, builder, joint, target, rng);
}

EstimateReport ais_gf_modified(const LabeledSample& initial, const AisOptions& opts,
                               const GfBuilder& builder, const JointProposal& joint,
                               const Target& target, RngStream& rng) {
  if (initial.empty()) throw std::invalid_argument("ais_gf_modified: no particles");
  const CountsView counts = counts_from_sample(initial);
  const GfConfig cfg = builder(initial, counts);
  if (cfg.log_rho.size() != initial.size())
    throw std::invalid_argument("ais_gf_modified: rho must have one entry per particle");
  auto pot = [&](std::size_t i, PointView x, double gamma) {
    return log_potential_gf(i, x, initial.label(i), gamma, cfg, joint, target);
  };
  auto base = [&](std::size_t i, PointView x) { return joint.log_density(x, initial.label(i)); };
  EstimateReport r = run_modified(initial, opts, k_eff(counts), cfg.evaluations_per_point + 2, pot,
                                  base, rng, "ais_gf_modified");
  r.diagnostics["normalizer_guaranteed"] = cfg.psi_constant ? 1.0 : 0.0;
  return r;
}

}  // namespace zest
