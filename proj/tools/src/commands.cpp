#include "zest_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#include "zest/combination.hpp"
#include "zest/experiment.hpp"
#include "zest/oracles.hpp"
#include "zest/running_example.hpp"
#include "zest_cli/config.hpp"

namespace zest::cli {

namespace {

// Opens `path` for writing, or hands back `fallback` when path is empty.
class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_.open(path, std::ios::out | std::ios::trunc | std::ios::binary);
      stream_ = &file_;
    }
  }
  bool ok() const { return static_cast<bool>(*stream_); }
  std::ostream& stream() { return *stream_; }
  bool close() {
    stream_->flush();
    if (file_.is_open()) file_.close();
    return !file_.fail() && static_cast<bool>(*stream_);
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

// Loads the configuration, mapping failures to exit codes.
int load(const CliInvocation& inv, ExperimentConfig& cfg, std::ostream& err) {
  if (inv.config_path.empty()) {
    err << "error: --config is required\n";
    return kExitConfig;
  }
  try {
    cfg = load_config(inv.config_path, inv.overrides);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

double quantile(const std::vector<double>& sorted, double p) {
  if (sorted.size() == 1) return sorted.front();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string describe(const TinyGfSpec& t) {
  std::ostringstream os;
  os << "N=" << t.N << ";K=" << t.K << ";m=" << format_double(t.m) << ";s=" << format_double(t.s)
     << ";gf=" << t.gf;
  return os.str();
}

}  // namespace

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (const int rc = load(inv, cfg, err); rc != kExitOk) return rc;

  OutputSink sink(inv.output_path, out);
  if (!sink.ok()) {
    err << "I/O error: cannot open '" << inv.output_path << "' for writing\n";
    return kExitIo;
  }
  const std::vector<ResultRow> rows = run_experiment(cfg, inv.workers);
  write_csv_header(sink.stream());
  std::size_t failures = 0;
  for (const ResultRow& row : rows) {
    write_csv_row(sink.stream(), row);
    if (row.status != "ok") ++failures;
  }
  if (!sink.close()) {
    err << "I/O error: failed writing results\n";
    return kExitIo;
  }
  if (failures > 0) err << "warning: " << failures << " of " << rows.size() << " rows reported errors\n";
  return kExitOk;
}

int cmd_oracle(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (const int rc = load(inv, cfg, err); rc != kExitOk) return rc;
  const QuadratureSpec quad{cfg.oracle.lower, cfg.oracle.upper, cfg.oracle.points};

  OutputSink sink(inv.output_path, out);
  if (!sink.ok()) {
    err << "I/O error: cannot open '" << inv.output_path << "' for writing\n";
    return kExitIo;
  }
  std::ostream& os = sink.stream();
  try {
    const Instance inst = build_instance(cfg);
    os << "quantity,label,value\n";
    if (cfg.proposal.kind == "gaussian_grid") {
      os << "Z,quadrature," << format_double(quadrature_z(*inst.target, quad)) << '\n';
      const std::size_t k = cfg.proposal.K;
      std::vector<Label> labels(k);
      std::iota(labels.begin(), labels.end(), Label{0});
      const bool truncated = k > 64;
      if (truncated) {
        std::stable_sort(labels.begin(), labels.end(), [&](Label a, Label b) {
          return inst.family->label_log_pmf(a) > inst.family->label_log_pmf(b);
        });
        labels.resize(64);
        std::sort(labels.begin(), labels.end());
      }
      const auto tau = quadrature_tau(*inst.target, *inst.joint, quad, labels);
      for (std::size_t j = 0; j < labels.size(); ++j)
        os << "tau," << labels[j] << ',' << format_double(tau[j]) << '\n';
      if (truncated) os << "tau_truncated,top_64_alpha," << k << '\n';
    } else {
      const auto& target = static_cast<const AscendingNormalTarget&>(*inst.target);
      if (target.dim() == 2) {
        const double z = simpson_2d_ascending(
            [&](double a, double b) {
              const double x[2] = {a, b};
              return std::exp(target.log_density(x));
            },
            QuadratureSpec{quad.lower, quad.upper, std::min<std::size_t>(quad.points, 1201) | 1});
        os << "Z,quadrature," << format_double(z) << '\n';
      }
      os << "Z,analytic," << format_double(std::exp(target.log_normalizer())) << '\n';
    }

    for (const TinyGfSpec& t : cfg.oracle.tiny) {
      const double mu_min = cfg.proposal.kind == "gaussian_grid" ? cfg.proposal.mu_min : -5.0;
      const double mu_max = cfg.proposal.kind == "gaussian_grid" ? cfg.proposal.mu_max : 5.0;
      const RunningExample ex = make_running_example(t.K, t.m, t.s, mu_min, mu_max);
      const auto joint = adapt_tractable_as_joint(ex.family);
      TinyInstance tiny{ex.target, ex.family, t.N, quad};
      GfBuilder builder;
      if (t.gf == "gf1")
        builder = [](const LabeledSample&, const CountsView& c) { return gf1_config(c); };
      else if (t.gf == "gf2")
        builder = [&](const LabeledSample& s, const CountsView& c) { return gf2_config(s, *joint, c); };
      else
        builder = [&](const LabeledSample& s, const CountsView&) { return bh_gf_config(s, *ex.family); };
      os << "gf_normalizer," << describe(t) << ',' << format_double(gf_normalizer_exact(builder, tiny))
         << '\n';
    }
  } catch (const Error& e) {
    err << "oracle error: " << e.what() << '\n';
    return kExitFailure;
  }
  if (!sink.close()) {
    err << "I/O error: failed writing oracle output\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_summarize(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  const std::string& path = inv.input_path;
  if (path.empty()) {
    err << "error: --in is required\n";
    return kExitConfig;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "I/O error: cannot read '" << path << "'\n";
    return kExitIo;
  }

  struct Group {
    std::string experiment;
    std::string estimator;
    std::vector<double> log_z;
    double k_eff_sum = 0.0;
    double cost_sum = 0.0;
    std::size_t errors = 0;
  };
  std::vector<Group> groups;
  std::map<std::pair<std::string, std::string>, std::size_t> index;

  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    err << "I/O error: '" << path << "' does not start with the result header\n";
    return kExitIo;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 17) {
      err << "I/O error: line " << line_no << ": expected 17 fields, found " << f.size() << '\n';
      return kExitIo;
    }
    double log_z = 0.0, k_eff = 0.0, cost = 0.0;
    try {
      log_z = f[12] == "nan" ? std::numeric_limits<double>::quiet_NaN() : parse_real(f[12]);
      k_eff = parse_real(f[13]);
      cost = parse_real(f[14]);
    } catch (const std::invalid_argument& e) {
      err << "I/O error: line " << line_no << ": " << e.what() << '\n';
      return kExitIo;
    }
    const auto key = std::make_pair(f[0], f[3]);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, groups.size()).first;
      groups.push_back({f[0], f[3], {}, 0.0, 0.0, 0});
    }
    Group& g = groups[it->second];
    if (f[16] != "ok") {
      ++g.errors;
      continue;
    }
    g.log_z.push_back(log_z);
    g.k_eff_sum += k_eff;
    g.cost_sum += cost;
  }

  OutputSink sink(inv.output_path, out);
  if (!sink.ok()) {
    err << "I/O error: cannot open '" << inv.output_path << "' for writing\n";
    return kExitIo;
  }
  std::ostream& os = sink.stream();
  os << "experiment_id,estimator,count,errors,mean_log_z,var_log_z,q05,q25,q50,q75,q95,mean_k_eff,"
        "mean_cost_units\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Group& g : groups) {
    const std::size_t n = g.log_z.size();
    double mean = nan, var = nan;
    std::vector<double> q(5, nan);
    if (n > 0) {
      mean = std::accumulate(g.log_z.begin(), g.log_z.end(), 0.0) / static_cast<double>(n);
      if (n > 1) {
        double ss = 0.0;
        for (double v : g.log_z) ss += (v - mean) * (v - mean);
        var = ss / static_cast<double>(n - 1);
      }
      std::vector<double> sorted = g.log_z;
      std::sort(sorted.begin(), sorted.end());
      const double ps[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
      for (int i = 0; i < 5; ++i) q[i] = quantile(sorted, ps[i]);
    }
    const double dn = n > 0 ? static_cast<double>(n) : nan;
    os << g.experiment << ',' << g.estimator << ',' << n << ',' << g.errors << ',' << format_double(mean)
       << ',' << format_double(var);
    for (double v : q) os << ',' << format_double(v);
    os << ',' << format_double(g.k_eff_sum / dn) << ',' << format_double(g.cost_sum / dn) << '\n';
  }
  if (!sink.close()) {
    err << "I/O error: failed writing summary\n";
    return kExitIo;
  }
  return kExitOk;
}

int cmd_selftest(const CliInvocation& inv, std::ostream& out, std::ostream&) {
  bool all = true;
  auto report = [&](const char* name, bool ok) {
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    all = all && ok;
  };

  const RunningExample ex = make_running_example(3, 0.5, 2.0);
  report("running-example target integrates to one",
         std::abs(quadrature_z(*ex.target) - 1.0) < 1e-10);

  const auto pmf = betabinom_label_pmf_table(5, 0.5, 2.0);
  report("beta-binomial labels at m=0.5, s=2 are uniform",
         std::all_of(pmf.begin(), pmf.end(), [](double p) { return std::abs(p - 0.2) < 1e-12; }));

  ExperimentConfig cfg;
  cfg.experiment_id = "selftest";
  cfg.N = 50;
  cfg.replicates = 4;
  cfg.seed = 7;
  cfg.annealing.T = 3;
  for (auto kind : {EstimatorKind::z_bh, EstimatorKind::z_rb, EstimatorKind::ais_modified})
    cfg.estimators.push_back({kind, "", std::nullopt, GfChoice::gf1});
  auto render = [&](std::size_t workers) {
    std::ostringstream os;
    write_csv_header(os);
    for (const auto& row : run_experiment(cfg, workers)) write_csv_row(os, row);
    return os.str();
  };
  const std::string one = render(1);
  report("experiment output is independent of worker count",
         one == render(std::max<std::size_t>(2, inv.workers)));
  report("experiment rows all succeed", one.find(",error: ") == std::string::npos);
  return all ? kExitOk : kExitFailure;
}

int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  if (inv.subcommand == "run") return cmd_run(inv, out, err);
  if (inv.subcommand == "oracle") return cmd_oracle(inv, out, err);
  if (inv.subcommand == "summarize") return cmd_summarize(inv, out, err);
  if (inv.subcommand == "selftest") return cmd_selftest(inv, out, err);
  err << "error: unknown subcommand '" << inv.subcommand << "'\n";
  return kExitConfig;
}

}  // namespace zest::cli
