#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "gmfkit/gmf.hpp"
#include "gmfkit/hset.hpp"

// Independent reference computations used by the acceptance criteria and the tests.
// Nothing here calls the closed forms it is meant to check.
namespace gmfkit::oracle {

using Rng = std::mt19937_64;

RectMatrix gaussian(Rng& rng, int rows, int cols);
SymMatrix random_sym(Rng& rng, int n);
// eigenvalues drawn from [lo, hi]
SymMatrix random_spd(Rng& rng, int n, double lo = 0.5, double hi = 2.0);
int uniform_int(Rng& rng, int lo, int hi);
double uniform(Rng& rng, double lo, double hi);

// A is l x n of rank <= l (sometimes deficient), B = A Y for a random Y.
ProblemData random_problem(Rng& rng, int n, int m, int l, const Tolerances& tol = {});
// V with N^T V N >= margin I; V itself may be indefinite.
SymMatrix random_interior(Rng& rng, const ProblemData& pd, double margin = 0.2);

// sup over A Y = B of <X, Y> - tr(Y^T V Y) / 2 for V positive definite on ker A, through a
// column-pivoted QR of A^T (rank cutoff 1e-10 relative) rather than pseudoinverses.
double gmf_value_kkt(const RectMatrix& a, const RectMatrix& b, const RectMatrix& x, const Eigen::MatrixXd& v);

// Sum of singular values via the eigenvalues of X^T X (no SVD).
double nuclear_norm_eig(const RectMatrix& x);
// sigma_i via eigenvalues of X^T X, descending
Vector singular_values_eig(const RectMatrix& x);

// sup_X <X, Y> - f(X) over a box of half-width `radius` around 0, on a grid with
// `points` nodes per axis followed by `zooms` refinements around the best node, each
// shrinking the half-width by `shrink` (never below one grid step). With `rotate_seed` set, each
// refinement lattice is turned by a random orthogonal matrix so that ridges of nonsmooth f that run
// diagonally to the axes can still be followed. Every node is feasible, so the value is a lower bound.
struct GridConj {
  double value = 0.0;
  RectMatrix argmax;
};
GridConj grid_conjugate(const std::function<double(const RectMatrix&)>& f, const RectMatrix& y, double radius,
                        int points, int zooms, double shrink, std::optional<std::uint64_t> rotate_seed = {});

// Central differences with step 1e-5 (1 + |entry|).
RectMatrix fd_gradient(const std::function<double(const RectMatrix&)>& f, const RectMatrix& x);
// Symmetric perturbations E_ij + E_ji.
SymMatrix fd_gradient_sym(const std::function<double(const SymMatrix&)>& f, const SymMatrix& v);

double soft_threshold(double t, double lambda);

// Largest eigenvalue by power iteration on a PSD matrix.
double power_max_eig(const SymMatrix& s, int iters = 2000);

// Ky Fan (p, k) norm of the top-k singular values, from the eigenvalue oracle above.
double kyfan_eig(const RectMatrix& x, double p, int k);

// sup over V in S n S^n_+ of <V, G> for G >= 0 by sampling extreme points where known:
// SpectralBox(lo, hi) -> max(hi, 0) tr G, TraceBall(r) -> r lambda_max(G) by power iteration.
double psd_support_oracle(const ConvexSetSpec& s, const SymMatrix& g);

// Random HSpec of dimension n drawn from all variants.
HSpec random_h(Rng& rng, int n);

}  // namespace gmfkit::oracle
