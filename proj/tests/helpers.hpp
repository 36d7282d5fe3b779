#pragma once

#include <cmath>

#include <doctest.h>

#include "oracles.hpp"

namespace gmfkit::test {

using oracle::Rng;

inline double rel_err(double got, double want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

inline RectMatrix mat(int rows, int cols, std::initializer_list<double> vals) {
  RectMatrix m(rows, cols);
  auto it = vals.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

inline SymMatrix sym(int n, std::initializer_list<double> vals) { return SymMatrix(mat(n, n, vals)); }

}  // namespace gmfkit::test
