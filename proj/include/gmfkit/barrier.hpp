#pragma once

#include <optional>
#include <vector>

#include "gmfkit/gmf.hpp"
#include "gmfkit/numlin.hpp"

namespace gmfkit {

// G(theta) = base + sum_i theta_i coeff[i]; an empty coeff[i] means zero.
struct AffineMap {
  Eigen::MatrixXd base;
  std::vector<Eigen::MatrixXd> coeff;

  AffineMap() = default;
  AffineMap(Eigen::MatrixXd b, int dim) : base(std::move(b)), coeff(dim) {}
  int dim() const { return static_cast<int>(coeff.size()); }
  Eigen::MatrixXd at(const Vector& theta) const;
  // returns M^T G(theta) M
  AffineMap congruence(const Eigen::MatrixXd& m) const;
};

// minimize cost.theta + phi(X(theta), V(theta)) subject to G_j(theta) > 0 (strict LMIs)
struct BarrierProblem {
  int dim = 0;
  Vector cost;
  std::vector<AffineMap> lmis;
  const ProblemData* pd = nullptr;  // phi term present when set
  AffineMap x_map;
  AffineMap v_map;
};

struct BarrierOptions {
  double gap_tol = 1e-10;          // stop when mu * nu <= gap_tol * (1 + |f|)
  double mu_factor = 0.1;
  int max_newton = 5000;
  double unbounded_below = -1e8;   // objective below this declares unboundedness
  int max_centering = 100;         // Newton steps per barrier stage
  double centering_tol = 1e-12;    // half the squared Newton decrement, relative
  int polish_steps = 30;           // barrier-free Newton steps after convergence
};

struct BarrierResult {
  enum class Status { Converged, Unbounded, IterCap, Stalled };
  Status status = Status::Converged;
  Vector theta;
  double objective = 0.0;  // without barrier terms
  int iterations = 0;
};

// Objective without barrier; +inf when infeasible or phi is +inf.
double barrier_objective(const BarrierProblem& pb, const Vector& theta, const Tolerances& tol);
bool strictly_feasible(const BarrierProblem& pb, const Vector& theta);

BarrierResult barrier_minimize(const BarrierProblem& pb, const Vector& theta0, const BarrierOptions& opt,
                               const Tolerances& tol);

struct InteriorSearch {
  std::optional<Vector> theta;  // strictly feasible point with margin > threshold
  double margin = 0.0;          // best min-eigenvalue margin found (max_theta min_j lambda_min G_j)
};

// Maximizes the common margin s in G_j(theta) - s I > 0 over a box around theta0.
// Only the LMIs flagged in `shifted` are relaxed; the others must hold strictly at theta0
// and remain enforced.
InteriorSearch find_interior(const std::vector<AffineMap>& lmis, const std::vector<bool>& shifted,
                             const Vector& theta0, double threshold, const Tolerances& tol);

}  // namespace gmfkit
