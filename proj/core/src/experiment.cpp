#include "zest/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "zest/estimators.hpp"
#include "zest/parallel.hpp"
#include "zest/running_example.hpp"

namespace zest {

namespace {

struct KindName {
  EstimatorKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {EstimatorKind::z_bh, "z_bh"},
    {EstimatorKind::z_rb, "z_rb"},
    {EstimatorKind::z_beta_uniform, "z_beta_uniform"},
    {EstimatorKind::z_beta_opt, "z_beta_opt"},
    {EstimatorKind::z_comb, "z_comb"},
    {EstimatorKind::z_gf1, "z_gf1"},
    {EstimatorKind::z_gf2, "z_gf2"},
    {EstimatorKind::ais_standard, "ais_standard"},
    {EstimatorKind::ais_modified, "ais_modified"},
    {EstimatorKind::ais_gf_modified, "ais_gf_modified"},
};

bool needs_family(EstimatorKind kind) {
  return kind == EstimatorKind::z_bh || kind == EstimatorKind::z_rb ||
         kind == EstimatorKind::ais_standard || kind == EstimatorKind::ais_modified;
}

bool is_plain_csv_field(const std::string& s) {
  return !s.empty() && s.find_first_of(",\"\n\r") == std::string::npos;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw std::invalid_argument(key + ": " + why);
}

void validate_annealing(const AnnealingSpec& a, const std::string& prefix) {
  if (a.T < 1) bad(prefix + ".T", "must be at least 1");
  if (a.kernel.mh_steps < 1) bad(prefix + ".mh_steps", "must be at least 1");
  if (!(a.kernel.mh_step_std > 0.0) || !std::isfinite(a.kernel.mh_step_std))
    bad(prefix + ".mh_step_std", "must be positive and finite");
  if (a.kernel.gibbs_sweeps < 1) bad(prefix + ".gibbs_sweeps", "must be at least 1");
}

}  // namespace

std::string_view to_string(EstimatorKind kind) {
  for (const auto& kn : kKindNames)
    if (kn.kind == kind) return kn.name;
  return "unknown";
}

EstimatorKind estimator_from_string(std::string_view name) {
  for (const auto& kn : kKindNames)
    if (kn.name == name) return kn.kind;
  throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

bool is_annealed(EstimatorKind kind) {
  return kind == EstimatorKind::ais_standard || kind == EstimatorKind::ais_modified ||
         kind == EstimatorKind::ais_gf_modified;
}

void validate(const ExperimentConfig& c) {
  if (c.schema_version != kSchemaVersion)
    bad("schema_version", "unsupported version " + std::to_string(c.schema_version));
  if (!is_plain_csv_field(c.experiment_id))
    bad("experiment_id", "must be non-empty and free of commas, quotes and newlines");
  if (c.N < 1) bad("run.N", "must be at least 1");
  if (c.replicates < 1) bad("run.replicates", "must be at least 1");

  const ProposalSpec& p = c.proposal;
  if (p.kind == "gaussian_grid") {
    if (p.K < 1) bad("proposal.K", "must be at least 1");
    if (!(p.m > 0.0 && p.m < 1.0)) bad("proposal.m", "must lie in (0, 1)");
    if (!(p.s > 0.0)) bad("proposal.s", "must be positive or inf");
    if (!(p.mu_min <= p.mu_max)) bad("proposal.mu_min", "must not exceed proposal.mu_max");
    if (c.target.kind != "standard_normal")
      bad("target.kind", "gaussian_grid proposals pair with the standard_normal target");
  } else if (p.kind == "ordered_insert") {
    if (p.n < 1) bad("proposal.n", "must be at least 1");
    if (c.target.kind != "ascending_normal")
      bad("target.kind", "ordered_insert proposals pair with the ascending_normal target");
  } else {
    bad("proposal.kind", "unknown proposal '" + p.kind + "'");
  }
  if (c.target.kind != "standard_normal" && c.target.kind != "ascending_normal")
    bad("target.kind", "unknown target '" + c.target.kind + "'");

  validate_annealing(c.annealing, "annealing");
  if (c.estimators.empty()) bad("estimators", "at least one estimator is required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.estimators.size(); ++i) {
    const EstimatorSpec& e = c.estimators[i];
    const std::string key = "estimators[" + std::to_string(i) + "]";
    const std::string name = e.name.empty() ? std::string(to_string(e.kind)) : e.name;
    if (!is_plain_csv_field(name)) bad(key + ".name", "must be free of commas, quotes and newlines");
    if (!names.insert(name).second) bad(key + ".name", "duplicate estimator name '" + name + "'");
    if (needs_family(e.kind) && p.kind != "gaussian_grid")
      bad(key + ".kind", std::string(to_string(e.kind)) + " needs a tractable proposal family");
    const AnnealingSpec& a = e.annealing ? *e.annealing : c.annealing;
    if (e.annealing) validate_annealing(*e.annealing, key + ".annealing");
    if (is_annealed(e.kind)) {
      if (e.kind != EstimatorKind::ais_gf_modified && a.scheme == Scheme::gf_semi_geometric)
        bad(key + ".annealing.scheme", "gf_semi_geometric is only valid for ais_gf_modified");
      if (e.kind != EstimatorKind::ais_standard && a.kernel.kind == KernelKind::collapsed_gibbs)
        bad(key + ".annealing.kernel", "collapsed_gibbs is only valid for ais_standard");
    }
  }
  if (!(c.oracle.lower < c.oracle.upper)) bad("oracle.lower", "must be below oracle.upper");
  if (c.oracle.points < 3 || c.oracle.points % 2 == 0) bad("oracle.points", "must be odd and at least 3");
  for (std::size_t i = 0; i < c.oracle.tiny.size(); ++i) {
    const TinyGfSpec& t = c.oracle.tiny[i];
    const std::string key = "oracle.tiny[" + std::to_string(i) + "]";
    if (t.N < 1 || t.N > 4) bad(key + ".N", "must lie in [1, 4]");
    if (t.K < 1 || t.K > 3) bad(key + ".K", "must lie in [1, 3]");
    if (!(t.m > 0.0 && t.m < 1.0)) bad(key + ".m", "must lie in (0, 1)");
    if (!(t.s > 0.0)) bad(key + ".s", "must be positive or inf");
    if (t.gf != "gf1" && t.gf != "gf2" && t.gf != "bh") bad(key + ".gf", "must be gf1, gf2 or bh");
  }
}

Instance build_instance(const ExperimentConfig& c) {
  Instance inst;
  if (c.proposal.kind == "gaussian_grid") {
    auto ex = make_running_example(c.proposal.K, c.proposal.m, c.proposal.s, c.proposal.mu_min,
                                   c.proposal.mu_max);
    inst.target = ex.target;
    inst.family = ex.family;
    inst.joint = adapt_tractable_as_joint(ex.family);
  } else {
    inst.target = std::make_shared<AscendingNormalTarget>(c.proposal.n + 1, c.target.shift);
    inst.joint = std::make_shared<OrderedInsertProposal>(c.proposal.n);
  }
  return inst;
}

namespace {

struct RowContext {
  const ExperimentConfig& config;
  const Instance& inst;
};

AisOptions ais_options(const AnnealingSpec& a) {
  AisOptions o;
  o.schedule = linear_schedule(a.T);
  o.scheme = a.scheme;
  o.kernel = a.kernel;
  o.workers = 1;  // replicates already run in parallel
  return o;
}

EstimateReport run_estimator(const RowContext& ctx, const EstimatorSpec& spec, std::size_t n_used,
                             const LabeledSample& reference, RngStream& rng) {
  const Target& target = *ctx.inst.target;
  const JointProposal& joint = *ctx.inst.joint;
  const AnnealingSpec& a = spec.annealing ? *spec.annealing : ctx.config.annealing;
  switch (spec.kind) {
    case EstimatorKind::z_bh:
      return z_bh(reference, target, *ctx.inst.family);
    case EstimatorKind::z_rb:
      return z_rb(draw_labeled_sample(*ctx.inst.family, n_used, rng), target, *ctx.inst.family);
    case EstimatorKind::z_beta_uniform:
      return z_beta(draw_joint_sample(joint, n_used, rng), target, joint, beta_uniform(joint.num_labels()));
    case EstimatorKind::z_beta_opt:
      return z_beta(draw_joint_sample(joint, n_used, rng), target, joint, beta_opt(joint));
    case EstimatorKind::z_comb:
      return z_comb(draw_joint_sample(joint, n_used, rng), target, joint);
    case EstimatorKind::z_gf1: {
      const LabeledSample s = draw_joint_sample(joint, n_used, rng);
      return z_gf(s, target, joint, gf1_config(counts_from_sample(s)));
    }
    case EstimatorKind::z_gf2: {
      const LabeledSample s = draw_joint_sample(joint, n_used, rng);
      return z_gf(s, target, joint, gf2_config(s, joint, counts_from_sample(s)));
    }
    case EstimatorKind::ais_standard:
      return ais_standard(n_used, ais_options(a), *ctx.inst.family, target, rng);
    case EstimatorKind::ais_modified:
      return ais_modified(n_used, ais_options(a), *ctx.inst.family, target, rng);
    case EstimatorKind::ais_gf_modified: {
      GfBuilder builder;
      if (spec.gf == GfChoice::gf1)
        builder = [](const LabeledSample&, const CountsView& c) { return gf1_config(c); };
      else
        builder = [&joint](const LabeledSample& s, const CountsView& c) { return gf2_config(s, joint, c); };
      AisOptions o = ais_options(a);
      o.scheme = Scheme::gf_semi_geometric;
      return ais_gf_modified(n_used, o, builder, joint, target, rng);
    }
  }
  throw std::logic_error("unhandled estimator kind");
}

std::string sanitize_status(std::string msg) {
  for (char& ch : msg)
    if (ch == ',' ) ch = ';';
    else if (ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
  return "error: " + msg;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t workers) {
  validate(config);
  const Instance inst = build_instance(config);
  const RowContext ctx{config, inst};
  const RngStream master(config.seed);
  const bool grid = config.proposal.kind == "gaussian_grid";
  const std::size_t k = grid ? config.proposal.K : config.proposal.n + 1;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<std::vector<ResultRow>> per_replicate(config.replicates);
  parallel_for(config.replicates, workers, [&](std::size_t r) {
    const RngStream stream = master.substream(r);
    // The balance-heuristic reference sample fixes K_eff for cost matching.
    RngStream ref_rng = stream.substream(0);
    const LabeledSample reference = draw_joint_sample(*inst.joint, config.N, ref_rng);
    const std::size_t ref_keff = k_eff(counts_from_sample(reference));

    auto& rows = per_replicate[r];
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
      const EstimatorSpec& spec = config.estimators[e];
      const AnnealingSpec& a = spec.annealing ? *spec.annealing : config.annealing;
      ResultRow row;
      row.experiment_id = config.experiment_id;
      row.replicate = r;
      row.seed = config.seed;
      row.estimator = spec.name.empty() ? std::string(to_string(spec.kind)) : spec.name;
      row.K = k;
      row.m = grid ? config.proposal.m : nan;
      row.s = grid ? config.proposal.s : nan;
      if (is_annealed(spec.kind)) {
        row.T = a.T;
        row.scheme = spec.kind == EstimatorKind::ais_gf_modified
                         ? std::string(to_string(Scheme::gf_semi_geometric))
                         : std::string(to_string(a.scheme));
        row.kernel = std::string(to_string(a.kernel.kind));
      }
      row.n_used = config.N;
      if (config.cost_matching &&
          (spec.kind == EstimatorKind::z_rb || spec.kind == EstimatorKind::z_beta_opt)) {
        const double matched = std::round(static_cast<double>(config.N) * static_cast<double>(ref_keff) /
                                          static_cast<double>(k));
        row.n_used = std::max<std::size_t>(1, static_cast<std::size_t>(matched));
      }

      RngStream rng = stream.substream(e + 1);
      const auto start = std::chrono::steady_clock::now();
      try {
        const EstimateReport rep = run_estimator(ctx, spec, row.n_used, reference, rng);
        row.z_hat = rep.z_hat;
        row.log_z_hat = rep.log_z_hat;
        row.k_eff = rep.k_eff;
        row.cost_units = rep.cost_units;
      } catch (const std::exception& ex) {
        row.status = sanitize_status(ex.what());
      }
      if (config.record_wall_time)
        row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      rows.push_back(std::move(row));
    }
  });

  std::vector<ResultRow> out;
  out.reserve(config.replicates * config.estimators.size());
  for (auto& rows : per_replicate)
    for (auto& row : rows) out.push_back(std::move(row));
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_row(std::ostream& out, const ResultRow& r) {
  out << r.experiment_id << ',' << r.replicate << ',' << r.seed << ',' << r.estimator << ','
      << r.n_used << ',' << r.K << ',' << format_double(r.m) << ',' << format_double(r.s) << ','
      << r.T << ',' << r.scheme << ',' << r.kernel << ',' << format_double(r.z_hat) << ','
      << format_double(r.log_z_hat) << ',' << r.k_eff << ',' << r.cost_units << ',' << r.wall_ns
      << ',' << r.status << '\n';
}

}  // namespace zest
