#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace tlab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Levi-Civita symbol on {0,1,2}, spelled out so index conventions stay visible.
constexpr double levi(int i, int j, int k) {
  return 0.5 * double((i - j) * (j - k) * (k - i));
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  Vec3 r = Vec3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r(i) += levi(i, j, k) * a(j) * b(k);
  return r;
}

inline Mat3 dev(const Mat3& G) { return G - G.trace() / 3.0 * Mat3::Identity(); }

// d(det X)/dX = tr(a) I - a^T at X = I + a, to first order
inline Mat3 det_linear_gradient(const Mat3& a) {
  return a.trace() * Mat3::Identity() - a.transpose();
}

inline double contract(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

// Row-major flattening of a 3x3 block into / out of a flat buffer.
template <class Vec>
inline void put_block(Vec& v, int offset, const Mat3& m) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) v[offset + 3 * r + c] = m(r, c);
}

template <class Vec>
inline Mat3 get_block(const Vec& v, int offset) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[offset + 3 * r + c];
  return m;
}

inline double det_checked(const Mat3& m, const char* what) {
  const double d = m.determinant();
  if (!(d > 0.0)) throw DomainError(std::string("non-positive determinant of ") + what);
  return d;
}

}  // namespace tlab
