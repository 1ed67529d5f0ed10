#pragma once

#include <string>
#include <vector>

namespace pencil {

/// Command-line driver. Subcommands: scan, spectrum, weyl, asym, inverse,
/// scenario, validate. Returns 0 on success, 1 when a check fails, 2 on
/// configuration errors.
int dispatch(const std::vector<std::string>& args);
int dispatch(int argc, char** argv);

}  // namespace pencil
