#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bwkb/harness.hpp"

namespace bwkb {

// Scenario from a built-in name or an INI file with sections [scenario], [lattice],
// [potential], [bloch], [confinement], [initial], [nls], [sweep]. Keys left out keep the
// values of the scenario named by [scenario] base (or the plain defaults).
Scenario load_scenario(const std::string& name_or_path);
Scenario parse_scenario(std::istream& in, const std::string& origin = "<stream>");

// Full INI description; parsing it back yields an identical scenario.
std::string scenario_to_ini(const Scenario& s);

// Scenario INI plus a [run] section with the given entries.
void write_manifest(const std::filesystem::path& path, const Scenario& s,
                    const std::map<std::string, std::string>& run);

// "1/32", "0.125", "1e-2"
Real parse_number(const std::string& text);
std::vector<Real> parse_number_list(const std::string& text);

}  // namespace bwkb
