#pragma once

#include "maxclaim/aggregate.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace maxclaim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitFit = 4;

// Runs the command line (args[0] is the program name). Primary output goes to
// --out when given, else to `out`; the resolved configuration goes to
// <out>.config.json, else to `err`, as do diagnostics.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "poisson:156.2", "fixed:10", or "<mixing model>:<theta>".
CountLaw parse_count(const std::string& spec);

// Fixed-width table; monetary columns in millions with two decimals.
std::string pretty_table(const std::string& csv, const std::vector<std::string>& money_columns);

} // namespace maxclaim::cli
