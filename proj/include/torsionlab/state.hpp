#pragma once

#include "tensor.hpp"

#include <array>
#include <string>

namespace tlab {

inline constexpr int kNumFields = 39;
using Vec39 = Eigen::Matrix<double, kNumFields, 1>;
using Mat39 = Eigen::Matrix<double, kNumFields, kNumFields>;

// Offsets of the five blocks inside a packed 39-vector. The first block holds
// M for conservative vectors and v for primitive ones.
namespace block {
inline constexpr int M = 0;
inline constexpr int A = 3;
inline constexpr int P = 12;
inline constexpr int B = 21;
inline constexpr int D = 30;
}  // namespace block

// A[frame][spatial], P[micro][frame], B[frame][spatial], D[frame][spatial]
struct PointState {
  Vec3 M = Vec3::Zero();
  Mat3 A = Mat3::Identity();
  Mat3 P = Mat3::Identity();
  Mat3 B = Mat3::Zero();
  Mat3 D = Mat3::Zero();

  Vec39 pack() const {
    Vec39 q;
    for (int i = 0; i < 3; ++i) q[block::M + i] = M(i);
    put_block(q, block::A, A);
    put_block(q, block::P, P);
    put_block(q, block::B, B);
    put_block(q, block::D, D);
    return q;
  }

  static PointState unpack(const Vec39& q) {
    PointState s;
    for (int i = 0; i < 3; ++i) s.M(i) = q[block::M + i];
    s.A = get_block(q, block::A);
    s.P = get_block(q, block::P);
    s.B = get_block(q, block::B);
    s.D = get_block(q, block::D);
    return s;
  }
};

// Stable names of the 39 primitive fields in flat order; "v" replaces "M" in
// primitive vectors.
inline std::array<std::string, kNumFields> field_names(bool primitive = true) {
  std::array<std::string, kNumFields> n;
  const char* first = primitive ? "v" : "M";
  for (int i = 0; i < 3; ++i) n[i] = std::string(first) + std::to_string(i + 1);
  const char* tags[4] = {"A", "P", "B", "D"};
  for (int b = 0; b < 4; ++b)
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        n[3 + 9 * b + 3 * r + c] = std::string(tags[b]) + std::to_string(r + 1) + std::to_string(c + 1);
  return n;
}

}  // namespace tlab
