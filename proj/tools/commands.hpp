#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gmfkit/io.hpp"

namespace gmfkit::cli {

// Parsed command line; empty strings mean "not given".
struct Options {
  std::string command;
  std::string a, b, x, v, y;  // CSV paths, or "zero" for A and B
  std::string bundle, out, set, mask, trace;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_rank, tol_psd, tol_feas, tol_conj;
  std::string p;  // Ky Fan exponent, a number or "inf"
  std::optional<int> k;
  std::optional<int> max_iter;
  std::optional<double> lambda;
  bool assume_ccq = false;
};

enum ExitCode { kOk = 0, kError = 1, kUndecided = 2 };

const std::vector<std::string>& command_names();
const std::vector<std::string>& command_help();  // one line per name, same order

// Runs one command. The RunReport JSON goes to `out` (or the --out file), messages to `err`.
int run(const Options& opt, std::ostream& out, std::ostream& err);

// The report without its timing entry, for determinism checks.
io::Json strip_timing(io::Json report);

constexpr std::uint64_t kDefaultSeed = 20240601;

}  // namespace gmfkit::cli
