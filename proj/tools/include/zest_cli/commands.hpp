#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace zest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

struct CliInvocation {
  std::string subcommand;
  std::string config_path;
  std::string input_path;   // summarize only
  std::string output_path;  // empty means standard output
  std::vector<std::string> overrides;
  std::size_t workers = 0;  // 0 means hardware concurrency
};

int cmd_run(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_oracle(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_summarize(const CliInvocation& inv, std::ostream& out, std::ostream& err);
int cmd_selftest(const CliInvocation& inv, std::ostream& out, std::ostream& err);

/// Dispatches on inv.subcommand.
int dispatch(const CliInvocation& inv, std::ostream& out, std::ostream& err);

}  // namespace zest::cli
