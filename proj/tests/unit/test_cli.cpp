#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zest_cli/commands.hpp"
#include "zest_cli/config.hpp"

namespace zest::cli {
namespace {

namespace fs = std::filesystem;

const std::string kMinimal = R"(schema_version: 1
proposal:
  K: 3
estimators: [z_bh, z_rb]
)";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("zest_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path / name;
    std::ofstream(p) << text;
    return p.string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(ParseConfig, MinimalDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.annealing.T, 21u);
  EXPECT_EQ(c.annealing.kernel.mh_steps, 10u);
  EXPECT_EQ(c.annealing.kernel.mh_step_std, 1.0);
  EXPECT_EQ(c.proposal.K, 3u);
  EXPECT_EQ(c.estimators.size(), 2u);
  EXPECT_EQ(c.replicates, 200u);
}

TEST(ParseConfig, UnknownKeyIsNamed) {
  const std::string text = R"(schema_version: 1
proposal:
  K: 3
  mm: 0.5
estimators: [z_bh]
)";
  try {
    parse_config(text);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("proposal.mm"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unknown key"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 4"), std::string::npos) << msg;
  }
}

TEST(ParseConfig, InfinityToken) {
  const auto c = parse_config(R"(schema_version: 1
proposal: {K: 5, s: inf}
estimators: [z_bh]
)");
  EXPECT_TRUE(std::isinf(c.proposal.s));
  EXPECT_TRUE(std::isinf(parse_config(kMinimal, {"proposal.s=.inf"}).proposal.s));
}

TEST(ParseConfig, SyntaxErrorHasPosition) {
  try {
    parse_config("schema_version: 1\nproposal: [K: 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line "), std::string::npos);
  }
}

TEST(ParseConfig, Overrides) {
  const auto c = parse_config(kMinimal, {"run.N=77", "annealing.T=4", "estimators.1=z_comb"});
  EXPECT_EQ(c.N, 77u);
  EXPECT_EQ(c.annealing.T, 4u);
  EXPECT_EQ(c.estimators[1].kind, EstimatorKind::z_comb);
  EXPECT_THROW(parse_config(kMinimal, {"run.N"}), ConfigError);
  EXPECT_THROW(parse_config(kMinimal, {"estimators.9=z_bh"}), ConfigError);
}

TEST(ParseConfig, EstimatorAnnealingInheritsGlobal) {
  const auto c = parse_config(R"(schema_version: 1
annealing: {T: 7, mh_steps: 3}
estimators:
  - kind: ais_standard
    annealing: {kernel: collapsed_gibbs}
)");
  ASSERT_TRUE(c.estimators[0].annealing.has_value());
  EXPECT_EQ(c.estimators[0].annealing->T, 7u);
  EXPECT_EQ(c.estimators[0].annealing->kernel.mh_steps, 3u);
  EXPECT_EQ(c.estimators[0].annealing->kernel.kind, KernelKind::collapsed_gibbs);
}

TEST(ParseConfig, ValidationFailures) {
  EXPECT_THROW(parse_config("estimators: [z_bh]\n"), ConfigError);               // no schema_version
  EXPECT_THROW(parse_config(kMinimal, {"schema_version=2"}), ConfigError);      // unsupported
  EXPECT_THROW(parse_config(kMinimal, {"run.N=-3"}), ConfigError);              // not a count
  EXPECT_THROW(parse_config(kMinimal, {"proposal.m=1.5"}), ConfigError);        // outside (0,1)
  EXPECT_THROW(parse_config(kMinimal, {"estimators.0=z_nope"}), ConfigError);   // unknown estimator
  EXPECT_THROW(parse_config(kMinimal, {"annealing.kernel=collapsed_gibbs", "estimators.0=ais_modified"}),
               ConfigError);
}

TEST(ParseConfig, AllShippedPresetsParse) {
  for (const auto& entry : fs::directory_iterator(ZEST_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(load_config(entry.path().string())) << entry.path();
  }
}

TEST(Commands, RunWritesCsvAndIsByteIdentical) {
  TempDir dir;
  const auto cfg = dir.write("c.yaml", kMinimal);
  CliInvocation inv{"run", cfg, "", (dir.path / "a.csv").string(), {"run.replicates=3"}, 1};
  std::ostringstream out, err;
  ASSERT_EQ(dispatch(inv, out, err), kExitOk) << err.str();
  inv.output_path = (dir.path / "b.csv").string();
  inv.workers = 2;
  ASSERT_EQ(dispatch(inv, out, err), kExitOk);
  const auto a = slurp((dir.path / "a.csv").string());
  EXPECT_EQ(a, slurp((dir.path / "b.csv").string()));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 3 * 2);
  EXPECT_NE(a.find(",z_rb,"), std::string::npos);
}

TEST(Commands, ExitCodes) {
  TempDir dir;
  std::ostringstream out, err;
  const auto good = dir.write("good.yaml", kMinimal);
  const auto bad = dir.write("bad.yaml", "schema_version: 1\nbogus: 1\nestimators: [z_bh]\n");

  EXPECT_EQ(dispatch({"run", bad, "", "", {}, 1}, out, err), kExitConfig);
  EXPECT_EQ(dispatch({"run", (dir.path / "missing.yaml").string(), "", "", {}, 1}, out, err), kExitIo);
  EXPECT_EQ(dispatch({"run", good, "", "/nonexistent_dir/x/out.csv", {"run.replicates=1"}, 1}, out, err),
            kExitIo);
  EXPECT_EQ(dispatch({"oracle", bad, "", "", {}, 1}, out, err), kExitConfig);
  EXPECT_EQ(dispatch({"summarize", "", (dir.path / "none.csv").string(), "", {}, 1}, out, err), kExitIo);
  EXPECT_EQ(dispatch({"frobnicate", "", "", "", {}, 1}, out, err), kExitConfig);
}

TEST(Commands, OracleReportsUnitNormalizer) {
  TempDir dir;
  const auto cfg = dir.write("c.yaml", kMinimal + "oracle:\n  tiny:\n    - {N: 3, K: 3, gf: gf1}\n");
  std::ostringstream out, err;
  ASSERT_EQ(dispatch({"oracle", cfg, "", "", {}, 1}, out, err), kExitOk) << err.str();
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "quantity,label,value");
  int taus = 0;
  bool saw_z = false, saw_gf = false;
  while (std::getline(lines, line)) {
    const auto last = line.rfind(',');
    const double v = std::stod(line.substr(last + 1));
    if (line.rfind("Z,", 0) == 0) {
      saw_z = true;
      EXPECT_NEAR(v, 1.0, 1e-10);
    } else if (line.rfind("tau,", 0) == 0) {
      ++taus;
      EXPECT_GT(v, 1.0);
    } else if (line.rfind("gf_normalizer,", 0) == 0) {
      saw_gf = true;
      EXPECT_NEAR(v, 1.0, 1e-8);
    }
  }
  EXPECT_TRUE(saw_z);
  EXPECT_TRUE(saw_gf);
  EXPECT_EQ(taus, 3);
}

TEST(Commands, OracleTruncatesLargeK) {
  TempDir dir;
  const auto cfg = dir.write("c.yaml", kMinimal);
  std::ostringstream out, err;
  ASSERT_EQ(dispatch({"oracle", cfg, "", "", {"proposal.K=100"}, 1}, out, err), kExitOk) << err.str();
  const std::string s = out.str();
  EXPECT_NE(s.find("tau_truncated,top_64_alpha,100"), std::string::npos);
  std::size_t taus = 0;
  for (std::size_t p = s.find("\ntau,"); p != std::string::npos; p = s.find("\ntau,", p + 1)) ++taus;
  EXPECT_EQ(taus, 64u);
}

const char* kHeader =
    "experiment_id,replicate,seed,estimator,N_used,K,m,s,T,scheme,kernel,z_hat,log_z_hat,k_eff,cost_units,"
    "wall_ns,status\n";

std::string row(int rep, double log_z, const std::string& status = "ok") {
  std::ostringstream os;
  os << "e," << rep << ",1,z_bh,10,3,0.5,2,0,none,none," << std::exp(log_z) << ',' << log_z << ",3,30,0,"
     << status << '\n';
  return os.str();
}

TEST(Summarize, Quantiles) {
  TempDir dir;
  std::ostringstream out, err;
  const auto one = dir.write("one.csv", std::string(kHeader) + row(0, 0.25));
  ASSERT_EQ(dispatch({"summarize", "", one, "", {}, 1}, out, err), kExitOk) << err.str();
  EXPECT_NE(out.str().find("e,z_bh,1,0,0.25,nan,0.25,0.25,0.25,0.25,0.25,3,30"), std::string::npos)
      << out.str();

  std::ostringstream out3;
  const auto three =
      dir.write("three.csv", std::string(kHeader) + row(0, 1) + row(1, 3) + row(2, 2) + row(3, 9, "error: x"));
  ASSERT_EQ(dispatch({"summarize", "", three, "", {}, 1}, out3, err), kExitOk);
  EXPECT_NE(out3.str().find("e,z_bh,3,1,2,1,1.1000000000000001,1.5,2,2.5,2.8999999999999999,3,30"),
            std::string::npos)
      << out3.str();
}

TEST(Summarize, MalformedInputIsIoError) {
  TempDir dir;
  std::ostringstream out, err;
  const auto bad_header = dir.write("h.csv", "a,b,c\n");
  EXPECT_EQ(dispatch({"summarize", "", bad_header, "", {}, 1}, out, err), kExitIo);
  const auto bad_number = dir.write("n.csv", std::string(kHeader) + "e,0,1,z_bh,10,3,0.5,2,0,none,none,1,abc,3,30,0,ok\n");
  EXPECT_EQ(dispatch({"summarize", "", bad_number, "", {}, 1}, out, err), kExitIo);
  const auto short_row = dir.write("s.csv", std::string(kHeader) + "e,0,1\n");
  EXPECT_EQ(dispatch({"summarize", "", short_row, "", {}, 1}, out, err), kExitIo);
}

TEST(Summarize, PipelineIsStable) {
  TempDir dir;
  const auto cfg = dir.write("c.yaml", kMinimal);
  std::ostringstream out, err;
  const auto csv = (dir.path / "r.csv").string();
  ASSERT_EQ(dispatch({"run", cfg, "", csv, {"run.replicates=5"}, 1}, out, err), kExitOk);
  std::ostringstream s1, s2;
  ASSERT_EQ(dispatch({"summarize", "", csv, "", {}, 1}, s1, err), kExitOk);
  ASSERT_EQ(dispatch({"run", cfg, "", csv, {"run.replicates=5"}, 2}, out, err), kExitOk);
  ASSERT_EQ(dispatch({"summarize", "", csv, "", {}, 1}, s2, err), kExitOk);
  EXPECT_EQ(s1.str(), s2.str());
}

TEST(Selftest, Passes) {
  std::ostringstream out, err;
  EXPECT_EQ(dispatch({"selftest", "", "", "", {}, 2}, out, err), kExitOk) << out.str();
}

}  // namespace
}  // namespace zest::cli
