#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "criteria.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gmfkit acceptance criteria: one PASS/FAIL line each"};
  gmfkit::acceptance::Config cfg;
  if (const char* env = std::getenv("GMFKIT_SEED")) cfg.seed = std::stoull(env);
  std::vector<int> only;
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--only", only, "run only these criterion ids")->check(CLI::Range(1, gmfkit::acceptance::kCriterionCount));
  CLI11_PARSE(app, argc, argv);

  if (only.empty())
    for (int id = 1; id <= gmfkit::acceptance::kCriterionCount; ++id) only.push_back(id);
  int failed = 0;
  for (int id : only) {
    auto r = gmfkit::acceptance::run_criterion(id, cfg);
    std::cout << gmfkit::acceptance::format_line(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (failed == 0 ? "ALL PASS" : std::to_string(failed) + " FAILED") << " (seed " << cfg.seed << ")\n";
  return failed == 0 ? 0 : 1;
}
