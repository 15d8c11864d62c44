#ifndef DYADIM_RUNNER_HPP
#define DYADIM_RUNNER_HPP

#include <string>
#include <vector>

#include "dyadim/config.hpp"

namespace dyadim {

struct RunOptions {
  std::string output_dir;  // overrides config when non-empty
  bool seed_override{false};
  std::uint64_t seed{0};
  bool oracle{false};      // OR-ed with the config flag
  unsigned threads{1};     // worker cap, from DYADIM_THREADS
};

struct RunResult {
  std::vector<std::string> files_written;  // paths relative to output dir
  std::vector<std::string> summary_lines;  // also printed to stdout
};

// Executes one experiment command, writing data files plus manifest.json
// into the output directory. Data files are byte-identical across runs of
// the same resolved config and seed; the manifest isolates the timestamp.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

// argv-level entry used by the binary: parses arguments, loads the config,
// runs, prints summaries, and maps failures to nonzero exits (2 for
// argument/config errors, 1 for execution errors).
int run_cli(int argc, const char* const* argv);

}  // namespace dyadim

#endif
