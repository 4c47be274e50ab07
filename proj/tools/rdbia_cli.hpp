#pragma once

#include <string>

#include "rdbia/config.hpp"

namespace rdbia::cli {

struct CommonArgs {
  std::string config_path;
  std::string out_path;  // empty = stdout
  int jobs = 1;
  std::uint64_t seed = 0;      // 0 = take from config
  std::size_t budget = 0;      // 0 = take from config
  std::vector<double> D_override;
  std::vector<int> T_override;
  std::vector<int> tau_override;
};

// Each command returns a process exit code: 0 iff everything it asserts holds.
int cmd_chain_info(const CommonArgs& args);
int cmd_rd_curve(const CommonArgs& args);
int cmd_bounds(const CommonArgs& args);
int cmd_converge(const CommonArgs& args);
int cmd_oracle_compare(const CommonArgs& args);
int cmd_code_demo(const CommonArgs& args);

int run_cli(int argc, char** argv);

}  // namespace rdbia::cli
