#pragma once

#include <iosfwd>
#include <vector>

#include "gmfkit/gmf.hpp"
#include "gmfkit/infproj.hpp"

namespace gmfkit {

// f(X) = (1/2) |op vec(X) - target|^2 with vec stacking columns
struct LeastSquares {
  Eigen::MatrixXd op;  // k x (n m)
  Vector target;       // k
  int n = 0, m = 0;

  // Entry sampling: one row per observed (i, j).
  static LeastSquares mask(int n, int m, const std::vector<std::pair<int, int>>& observed, const Vector& values);
  // Empty map: f = 0.
  static LeastSquares empty(int n, int m);

  void validate() const;
  double value(const RectMatrix& x) const;
  RectMatrix gradient(const RectMatrix& x) const;
};

using FitSpec = LeastSquares;

struct SolveIterate {
  double objective = 0.0;
  double grad_norm = 0.0;
  double min_eig_v = 0.0;
};

struct SolveTrace {
  enum class Status { Converged, IterCap, Diverged };
  std::vector<SolveIterate> iterates;
  RectMatrix final_x;
  SymMatrix final_v;
  Status status = Status::IterCap;
};

std::string to_string(SolveTrace::Status s);

struct SmoothOptions {
  int max_iter = 5000;
  double tol_grad = 1e-9;         // relative stationarity target
  double boundary_fraction = 0.95;
};

// Minimizes F(X, V) = f(X) + phi(X, V) + <Ubar, V> over V > 0 (A = 0).
SolveTrace solve_smooth(const FitSpec& fit, const ProblemData& pd, const SymMatrix& ubar, const RectMatrix& x0,
                        const SymMatrix& v0, const Tolerances& tol = {}, const SmoothOptions& opt = {});

// Accelerated proximal gradient on f + lambda |L^T X|_*; L must be the identity.
RectMatrix solve_prox_reference(const FitSpec& fit, const SymMatrix& l, double lambda, const RectMatrix& x0,
                                double tol = 1e-13, int max_iter = 200000);

struct ObjectiveCertificate {
  double f_value = 0.0;  // F(X, V)
  ExtReal p_value;       // p(X) for h = <Ubar, .>
  double gap = 0.0;      // F(X, V) - f(X) - p(X)
};

ObjectiveCertificate objective_certificate(const FitSpec& fit, const SymMatrix& ubar, const RectMatrix& x,
                                           const SymMatrix& v, const Tolerances& tol = {});

// iter,F,grad_norm,min_eig_V
void write_trace_csv(const SolveTrace& trace, std::ostream& os);

}  // namespace gmfkit
