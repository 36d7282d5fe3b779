#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using gmfkit::cli::Options;
  CLI::App app{"gmfkit: generalized matrix-fractional functions, their infimal projections and VGFs"};
  app.require_subcommand(1);
  Options opt;

  const auto& names = gmfkit::cli::command_names();
  const auto& help = gmfkit::cli::command_help();
  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], help[i]);
    sub->add_option("--A", opt.a, "CSV path, or \"zero\"");
    sub->add_option("--B", opt.b, "CSV path, or \"zero\"");
    sub->add_option("--X", opt.x, "CSV path");
    sub->add_option("--V", opt.v, "CSV path (symmetrized, warning on asymmetry)");
    sub->add_option("--Y", opt.y, "CSV path");
    sub->add_option("--bundle", opt.bundle, "problem bundle JSON {A, B, h, tol}");
    sub->add_option("--set", opt.set, "set spec: JSON file path or inline JSON");
    sub->add_option("--mask", opt.mask, "CSV of 0/1 observed entries");
    sub->add_option("--trace", opt.trace, "write the solver trace CSV here");
    sub->add_option("--out", opt.out, "write the report here instead of stdout");
    sub->add_option("--seed", opt.seed, "random seed (default GMFKIT_SEED, else 20240601)");
    sub->add_option("--tol-rank", opt.tol_rank, "relative rank cutoff");
    sub->add_option("--tol-psd", opt.tol_psd, "PSD test tolerance");
    sub->add_option("--tol-feas", opt.tol_feas, "feasibility tolerance");
    sub->add_option("--tol-conj", opt.tol_conj, "relative conjugate tolerance");
    sub->add_option("--p", opt.p, "Ky Fan exponent, a number >= 1 or \"inf\"");
    sub->add_option("--k", opt.k, "Ky Fan order");
    sub->add_option("--max-iter", opt.max_iter, "solver iteration cap");
    sub->add_option("--lambda", opt.lambda, "nuclear norm weight (default 1)");
    sub->add_flag("--assume-ccq", opt.assume_ccq, "skip the CCQ check in conjugate");
    sub->callback([&opt, name = names[i]] { opt.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gmfkit::cli::kError;
  }
  return gmfkit::cli::run(opt, std::cout, std::cerr);
}
