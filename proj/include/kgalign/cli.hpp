#ifndef KGALIGN_CLI_HPP
#define KGALIGN_CLI_HPP

#include <string>
#include <vector>

namespace kgalign {

// Subcommands: train, eval, inspect, synth, pretrain-kg. Returns the process
// exit code. Exposed so tests can drive the CLI in-process.
int run_cli(std::vector<std::string> args);

}  // namespace kgalign

#endif
