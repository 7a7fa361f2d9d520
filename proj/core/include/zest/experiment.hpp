#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "zest/annealing.hpp"
#include "zest/combination.hpp"
#include "zest/proposal.hpp"

namespace zest {

inline constexpr int kSchemaVersion = 1;

enum class EstimatorKind {
  z_bh,
  z_rb,
  z_beta_uniform,
  z_beta_opt,
  z_comb,
  z_gf1,
  z_gf2,
  ais_standard,
  ais_modified,
  ais_gf_modified,
};

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(std::string_view name);
bool is_annealed(EstimatorKind kind);

enum class GfChoice { gf1, gf2 };

struct TargetSpec {
  std::string kind = "standard_normal";  // or "ascending_normal"
  double shift = 0.0;                    // ascending_normal only
};

struct ProposalSpec {
  std::string kind = "gaussian_grid";  // or "ordered_insert"
  std::size_t K = 3;
  double m = 0.5;
  double s = 2.0;  // +inf allowed
  double mu_min = -5.0;
  double mu_max = 5.0;
  std::size_t n = 1;  // ordered_insert base sample size
};

struct AnnealingSpec {
  std::size_t T = 21;
  Scheme scheme = Scheme::semi_geometric;
  KernelConfig kernel;
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::z_bh;
  std::string name;                      // CSV label; defaults to the kind
  std::optional<AnnealingSpec> annealing;  // overrides the experiment-level section
  GfChoice gf = GfChoice::gf1;           // ais_gf_modified only
};

/// One tiny instance for exact normalizer checks.
struct TinyGfSpec {
  std::size_t N = 2;
  std::size_t K = 2;
  double m = 0.5;
  double s = 2.0;
  std::string gf = "gf1";  // gf1, gf2 or bh
};

struct OracleSpec {
  double lower = -12.0;
  double upper = 12.0;
  std::size_t points = 4001;
  std::vector<TinyGfSpec> tiny;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string experiment_id = "experiment";
  TargetSpec target;
  ProposalSpec proposal;
  std::size_t N = 500;
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  bool cost_matching = false;
  bool record_wall_time = false;
  AnnealingSpec annealing;
  std::vector<EstimatorSpec> estimators;
  OracleSpec oracle;
};

/// Throws std::invalid_argument naming the offending key.
void validate(const ExperimentConfig& config);

/// Concrete target and proposals built from a config. `family` is null for
/// proposals that are only available as a joint sampler.
struct Instance {
  std::shared_ptr<const Target> target;
  std::shared_ptr<const ProposalFamily> family;
  std::shared_ptr<const JointProposal> joint;
};

Instance build_instance(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment_id;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  std::size_t n_used = 0;
  std::size_t K = 0;
  double m = 0.0;
  double s = 0.0;
  std::size_t T = 0;
  std::string scheme = "none";
  std::string kernel = "none";
  double z_hat = std::numeric_limits<double>::quiet_NaN();
  double log_z_hat = std::numeric_limits<double>::quiet_NaN();
  std::size_t k_eff = 0;
  std::uint64_t cost_units = 0;
  std::int64_t wall_ns = 0;
  std::string status = "ok";
};

/// Runs every (replicate, estimator) pair. Rows are ordered by replicate, then
/// by estimator position, and do not depend on `workers`. Estimator failures
/// become rows with an error status.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::size_t workers = 1);

inline constexpr const char* kCsvHeader =
    "experiment_id,replicate,seed,estimator,N_used,K,m,s,T,scheme,kernel,z_hat,log_z_hat,k_eff,"
    "cost_units,wall_ns,status";

/// 17 significant digits, which round-trips every double.
std::string format_double(double v);

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ResultRow& row);

}  // namespace zest
