#pragma once

#include <map>
#include <optional>
#include <string>

#include "gmfkit/barrier.hpp"
#include "gmfkit/gmf.hpp"
#include "gmfkit/hset.hpp"

namespace gmfkit {

// p(X) = inf_V phi(X, V) + h(V)
struct InfProjProblem {
  ProblemData pd;
  HSpec h;
  Tolerances tol;

  InfProjProblem(ProblemData pd_, HSpec h_, Tolerances tol_ = {});
};

enum class Decision { Holds, Fails, Undecided };
std::string to_string(Decision d);

struct CQReport {
  Decision ccq = Decision::Undecided;
  Decision sccq = Decision::Undecided;
  Decision pcq = Decision::Undecided;
  Decision spcq = Decision::Undecided;
  Decision bpcq = Decision::Undecided;
  std::map<std::string, std::string> diagnostics;
  std::optional<SymMatrix> certificate;  // a V in dom h n int K_A when CCQ holds
};

struct InfProjEval {
  ExtReal value = ExtReal::plus_inf();
  std::optional<SymMatrix> argmin_v;
  int inner_iterations = 0;
  std::optional<SymMatrix> unbounded_certificate;
  std::optional<SymMatrix> unbounded_origin;  // base point of the certified ray
};

// psi(X, V) = phi(X, V) + h(V)
ExtReal psi(const InfProjProblem& prob, const RectMatrix& x, const SymMatrix& v);

InfProjEval eval_p(const InfProjProblem& prob, const RectMatrix& x);

// psi strictly decreasing along V0 + t D for t = 1, 10, ..., 1e6 with a negative final slope.
bool certify_unbounded_ray(const InfProjProblem& prob, const RectMatrix& x, const SymMatrix& v0, const SymMatrix& d);

struct ConjEval {
  ExtReal value = ExtReal::plus_inf();
  std::optional<SymMatrix> witness;
};

// p*(Y). Throws UndecidedError when CCQ is needed but not established (unless assume_ccq).
ConjEval eval_p_conj(const InfProjProblem& prob, const RectMatrix& y, bool assume_ccq = false);

// Y in Xi(A, B): AY = B and Y Y^T / 2 in dom h* + K_A polar. Linear or Support h only.
bool xi_member(const InfProjProblem& prob, const RectMatrix& y);

// -q_X(0), the shifted dual value.
ExtReal dual_value(const InfProjProblem& prob, const RectMatrix& xbar);

struct SubdiffWitness {
  RectMatrix y;
  SymMatrix v;
  SymMatrix t;  // (Y, T) is a subgradient of phi at (X, V) and -T a subgradient of h at V
  double p_value = 0.0;
  double conj_value = 0.0;
  double fenchel_residual = 0.0;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requires PCQ and CCQ to hold (UndecidedError otherwise); NumericalError "witness rejected"
// when the Fenchel certificate fails.
SubdiffWitness subdiff_p_witness(const InfProjProblem& prob, const RectMatrix& xbar);

CQReport cq_report(const InfProjProblem& prob);

struct DomainCheck {
  bool member = false;
  std::optional<SymMatrix> certificate;  // V in dom h n K_A with (X; B) in rge M(V)
};
DomainCheck dom_p_check(const InfProjProblem& prob, const RectMatrix& x);
bool dom_p_member(const InfProjProblem& prob, const RectMatrix& x);

// sup <V, G> over V in S n K_A. Throws UndecidedError when the intersection has empty
// interior and no closed form applies. Returns -inf for an empty intersection.
SupportEval support_within_KA(const ConvexSetSpec& s, const ProblemData& pd, const SymMatrix& g,
                              const Tolerances& tol);

// Whether S n K_A is nonempty.
bool meets_KA(const ConvexSetSpec& s, const ProblemData& pd, const Tolerances& tol);

}  // namespace gmfkit
