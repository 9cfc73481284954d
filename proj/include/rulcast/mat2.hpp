#ifndef RULCAST_MAT2_HPP
#define RULCAST_MAT2_HPP

#include <cmath>

namespace rulcast {

// Symmetric 2x2 matrix over the sampled (log10_alpha, beta) block.
struct Mat2Sym {
  double m00 = 0.0;
  double m01 = 0.0;
  double m11 = 0.0;
};

// Lower-triangular Cholesky factor.
struct Chol2 {
  double l00 = 0.0;
  double l10 = 0.0;
  double l11 = 0.0;
};

// Tolerant of semi-definite input: a zero (or numerically negative) diagonal
// entry yields a zero row, which pins that coordinate. Used deliberately for
// one-dimensional sub-problems in tests.
inline Chol2 cholesky(const Mat2Sym& m) {
  Chol2 c;
  c.l00 = m.m00 > 0.0 ? std::sqrt(m.m00) : 0.0;
  c.l10 = c.l00 > 0.0 ? m.m01 / c.l00 : 0.0;
  const double rem = m.m11 - c.l10 * c.l10;
  c.l11 = rem > 0.0 ? std::sqrt(rem) : 0.0;
  return c;
}

inline Mat2Sym add_jitter(Mat2Sym m, double eps) {
  m.m00 += eps;
  m.m11 += eps;
  return m;
}

}  // namespace rulcast

#endif
