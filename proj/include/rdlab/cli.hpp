#pragma once

#include <string>
#include <vector>

#include "rdlab/io.hpp"

namespace rdlab::cli {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  long seed = 0; // reserved
};

int cmd_simulate(const Config& cfg, const GlobalArgs& args);
int cmd_classify(const Config& cfg, const GlobalArgs& args);
int cmd_bump(const Config& cfg, const GlobalArgs& args);
int cmd_front(const Config& cfg, const GlobalArgs& args);
int cmd_spectral(const Config& cfg, const GlobalArgs& args);
int cmd_threshold(const Config& cfg, const GlobalArgs& args);
int cmd_plot(const std::vector<std::string>& inputs, const GlobalArgs& args);

/// Shared entry point used by main() and the CLI tests.
int dispatch(int argc, char** argv);

} // namespace rdlab::cli
