#pragma once

#include <complex>

#include "qgraph/matrix.hpp"

namespace qgraph {

// A point in the cut plane C \ [0,inf).  boundary = true marks the
// non-tangential limit lambda + i0 with lambda real positive; there the
// branch takes the real value sqrt(lambda) >= 0.  Off the positive axis the
// branch is fixed by Im sqrt(z) > 0.
struct SpectralPoint {
  cd z{0.0, 0.0};
  bool boundary = false;

  static SpectralPoint interior(cd z) { return {z, false}; }
  static SpectralPoint lambda_plus_i0(double lambda) { return {cd(lambda, 0.0), true}; }

  SpectralPoint conj() const { return {std::conj(z), boundary}; }
};

inline cd sqrt_branch(const SpectralPoint& p) {
  if (p.boundary || (p.z.imag() == 0.0 && p.z.real() >= 0.0))
    return cd(std::sqrt(p.z.real()), 0.0);
  cd w = std::sqrt(p.z);  // principal branch, Re w >= 0
  if (w.imag() < 0.0) w = -w;
  return w;
}

inline cd sqrt_branch(cd z) { return sqrt_branch(SpectralPoint{z, false}); }

}  // namespace qgraph
