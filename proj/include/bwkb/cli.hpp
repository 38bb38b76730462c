#pragma once

#include <string>
#include <vector>

namespace bwkb {

// Subcommands: scale, bands, rays, wkb, solve, compare, wigner. Returns the exit code.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace bwkb
