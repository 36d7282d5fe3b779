#pragma once

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gmfkit/ext_real.hpp"
#include "gmfkit/gmf.hpp"
#include "gmfkit/numlin.hpp"

namespace gmfkit {

namespace set {
struct Singleton {
  SymMatrix u;
};
// {V : lo I <= V <= hi I}
struct SpectralBox {
  double lo, hi;
};
// {V >= 0 : tr V <= r}
struct TraceBall {
  double r;
};
// {0 <= V <= I, tr V <= k}
struct Fantope {
  int k;
};
struct Hull {
  std::vector<SymMatrix> vertices;
};
// pos{D} = {t D : t >= 0}
struct Ray {
  SymMatrix d;
};
// {V : 0 <= V <= U}
struct ShiftedPSDCap {
  SymMatrix u;
};
}  // namespace set

using ConvexSetSpec =
    std::variant<set::Singleton, set::SpectralBox, set::TraceBall, set::Fantope, set::Hull, set::Ray, set::ShiftedPSDCap>;

namespace hfun {
struct Linear {
  SymMatrix u;
};
struct Indicator {
  ConvexSetSpec set;
};
struct Support {
  ConvexSetSpec set;
};
}  // namespace hfun

using HSpec = std::variant<hfun::Linear, hfun::Indicator, hfun::Support>;

// Thrown when a question is outside what can be decided for the given variant.
class UndecidedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Checks the variant invariants for dimension n; throws std::invalid_argument.
void validate_set(const ConvexSetSpec& s, int n);
void validate_h(const HSpec& h, int n);

std::string set_name(const ConvexSetSpec& s);
bool is_bounded(const ConvexSetSpec& s);
bool contains_zero(const ConvexSetSpec& s, int n, const Tolerances& tol = {});
// True when the variant lies inside S^n_+ by construction.
bool is_psd_family(const ConvexSetSpec& s, const Tolerances& tol = {});

struct SupportEval {
  ExtReal value;
  std::optional<SymMatrix> witness;
};

SupportEval support(const ConvexSetSpec& s, const SymMatrix& g);

ExtReal gauge(const ConvexSetSpec& s, const SymMatrix& g, const Tolerances& tol = {});

bool member(const ConvexSetSpec& s, const SymMatrix& v, const Tolerances& tol = {});

ExtReal h_eval(const HSpec& h, const SymMatrix& v, const Tolerances& tol = {});
ExtReal h_conj(const HSpec& h, const SymMatrix& w, const Tolerances& tol = {});

// The compatibility order is the cone K = {PSD with range in ker A}; N is an
// orthonormal basis of ker A (identity for A = 0).
struct CompatibilityResult {
  bool compatible = true;
  std::optional<std::pair<SymMatrix, SymMatrix>> counterexample;  // (x, y)
  int pairs_checked = 0;
};

// Checks the given (x, y) pairs: each must satisfy y in K n S and x in K n (y - K);
// pairs violating that precondition are skipped. Fails on the first x outside S.
CompatibilityResult cone_compatible(const ConvexSetSpec& s, const std::vector<std::pair<SymMatrix, SymMatrix>>& pairs,
                                    const RectMatrix& ker_basis, const Tolerances& tol = {});

// Randomized falsifier: draws y from K n S and splits it.
CompatibilityResult cone_compatible(const ConvexSetSpec& s, const RectMatrix& ker_basis, int samples,
                                    std::mt19937_64& rng, const Tolerances& tol = {});

// Closed convex cones for the polar-sum identity.
namespace cone {
struct Psd {};
struct Nsd {};
struct RayCone {
  SymMatrix d;
};
}  // namespace cone
using ConeSpec = std::variant<cone::Psd, cone::Nsd, cone::RayCone>;

struct PolarCheckResult {
  bool consistent = true;
  int samples = 0;
  double max_error = 0.0;
};

// Compares the support of C + K computed by brute force (extreme points of C,
// scaled generators of K) with sigma_C + delta_{K polar} on sampled G.
PolarCheckResult polar_support_identity_check(const ConvexSetSpec& c, const ConeSpec& k,
                                              const std::vector<SymMatrix>& samples, std::mt19937_64& rng,
                                              const Tolerances& tol = {});

}  // namespace gmfkit
