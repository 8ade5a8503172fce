#pragma once

#include "state.hpp"

#include <Eigen/Eigenvalues>

#include <string>
#include <vector>

namespace tlab {

enum class ModeClass { longitudinal, rotational, shear, zero };

inline const char* to_string(ModeClass c) {
  switch (c) {
    case ModeClass::longitudinal: return "longitudinal";
    case ModeClass::rotational: return "rotational";
    case ModeClass::shear: return "shear";
    case ModeClass::zero: return "zero";
  }
  return "?";
}

// Action of an orthogonal map Q on the primitive 39-vector: every index is
// rotated, and B picks up det(Q) since it is the curl of A.
inline Mat39 field_transform(const Mat3& Q) {
  Mat39 T = Mat39::Zero();
  T.block<3, 3>(0, 0) = Q;
  const double det = Q.determinant();
  for (int b = 0; b < 4; ++b) {
    const int off = block::A + 9 * b;
    const double sign = (off == block::B) ? det : 1.0;
    for (int c = 0; c < 9; ++c) {
      Mat3 e = Mat3::Zero();
      e(c / 3, c % 3) = 1.0;
      const Mat3 img = sign * Q * e * Q.transpose();
      for (int r = 0; r < 9; ++r) T(off + r, off + c) = img(r / 3, r % 3);
    }
  }
  return T;
}

// Quarter turn about the propagation axis x and the mirror y -> -y.
inline Mat39 quarter_turn_x() {
  Mat3 Q;
  Q << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  return field_transform(Q);
}

inline Mat39 mirror_y() {
  Mat3 Q = Mat3::Identity();
  Q(1, 1) = -1.0;
  return field_transform(Q);
}

struct Sector {
  std::string name;
  ModeClass modeClass;
  Eigen::MatrixXd basis;  // orthonormal columns spanning the invariant subspace
};

// Isotypic decomposition under the symmetry group of a plane wave along x.
// A1 carries longitudinal motion, A2 and B1/B2 the rotational modes, and the two
// copies of the two-dimensional irrep the shear polarizations (named by the
// direction of the particle velocity).
inline std::vector<Sector> symmetry_sectors() {
  const Mat39 I = Mat39::Identity();
  const Mat39 R = quarter_turn_x();
  const Mat39 R2 = R * R, R3 = R2 * R;
  const Mat39 Y = mirror_y();
  const Mat39 even = 0.25 * (I + R + R2 + R3);
  const Mat39 odd = 0.25 * (I - R + R2 - R3);
  const Mat39 two = 0.5 * (I - R2);
  const Mat39 yp = 0.5 * (I + Y), ym = 0.5 * (I - Y);
  struct Spec {
    const char* name;
    ModeClass cls;
    Mat39 proj;
  };
  const Spec specs[] = {
      {"A1", ModeClass::longitudinal, even * yp}, {"A2", ModeClass::rotational, even * ym},
      {"B1", ModeClass::rotational, odd * yp},    {"B2", ModeClass::rotational, odd * ym},
      {"Ez", ModeClass::shear, two * yp},         {"Ey", ModeClass::shear, two * ym},
  };
  std::vector<Sector> out;
  for (const Spec& s : specs) {
    const Mat39 P = 0.5 * (s.proj + s.proj.transpose());
    Eigen::SelfAdjointEigenSolver<Mat39> es(P);
    std::vector<int> cols;
    for (int i = 0; i < kNumFields; ++i)
      if (es.eigenvalues()[i] > 0.5) cols.push_back(i);
    Eigen::MatrixXd Q(kNumFields, static_cast<int>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) Q.col(static_cast<int>(j)) = es.eigenvectors().col(cols[j]);
    out.push_back({s.name, s.cls, Q});
  }
  return out;
}

}  // namespace tlab
