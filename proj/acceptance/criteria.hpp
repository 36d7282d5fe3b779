#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gmfkit/numlin.hpp"

// The thirteen acceptance criteria, each run against independent oracles with pinned tolerances.
namespace gmfkit::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double measured = 0.0;   // worst error or violation count, criterion-specific
  double tolerance = 0.0;  // the pinned bound `measured` is held to
  std::string detail;
  double seconds = 0.0;
};

struct Config {
  std::uint64_t seed = 20240601;
  Tolerances tol;  // passed to every library call that takes tolerances
};

constexpr int kCriterionCount = 13;

// Exceptions inside a criterion become a FAIL with the message in `detail`.
CriterionResult run_criterion(int id, const Config& cfg = {});
std::vector<CriterionResult> run_all(const Config& cfg = {});

// "PASS  3  title  measured=... tol=... (1.2s) detail"
std::string format_line(const CriterionResult& r);

}  // namespace gmfkit::acceptance
