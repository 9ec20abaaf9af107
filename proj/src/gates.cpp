#include "qlsp/gates.hpp"

#include <cmath>

namespace qlsp {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
bool near_zero(cx v, double tol) { return std::abs(v) <= tol; }
}  // namespace

Mat2 Mat2::mul(const Mat2& r) const {
  return {a * r.a + b * r.c, a * r.b + b * r.d,
          c * r.a + d * r.c, c * r.b + d * r.d};
}

Mat2 Mat2::dagger() const {
  return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
}

bool Mat2::approx(const Mat2& r, double tol) const {
  return near_zero(a - r.a, tol) && near_zero(b - r.b, tol) &&
         near_zero(c - r.c, tol) && near_zero(d - r.d, tol);
}

bool Mat2::approx_up_to_phase(const Mat2& r, double tol) const {
  // Align on the largest entry of r, then compare.
  const cx* mine[4] = {&a, &b, &c, &d};
  const cx* theirs[4] = {&r.a, &r.b, &r.c, &r.d};
  int best = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(*theirs[i]) > std::abs(*theirs[best])) best = i;
  if (std::abs(*theirs[best]) <= tol) return approx(r, tol);
  if (std::abs(*mine[best]) <= tol) return false;
  cx phase = *theirs[best] / *mine[best];
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  Mat2 scaled{a * phase, b * phase, c * phase, d * phase};
  return scaled.approx(r, tol);
}

MatClass classify(const Mat2& m, double tol) {
  bool off_zero = near_zero(m.b, tol) && near_zero(m.c, tol);
  bool diag_zero = near_zero(m.a, tol) && near_zero(m.d, tol);
  if (off_zero) return MatClass::Diagonal;
  if (diag_zero) return MatClass::AntiDiagonal;
  return MatClass::General;
}

MatClass compose_class(MatClass first, MatClass then) {
  if (first == MatClass::General || then == MatClass::General)
    return MatClass::General;
  return first == then ? MatClass::Diagonal : MatClass::AntiDiagonal;
}

bool is_identity_up_to_phase(const Mat2& m, double tol) {
  return near_zero(m.b, tol) && near_zero(m.c, tol) && near_zero(m.a - m.d, tol);
}

Mat2 gate_h() { return {cx(kInvSqrt2, 0), cx(kInvSqrt2, 0), cx(kInvSqrt2, 0), cx(-kInvSqrt2, 0)}; }
Mat2 gate_x() { return {0, 1, 1, 0}; }
Mat2 gate_y() { return {0, cx(0, -1), cx(0, 1), 0}; }
Mat2 gate_z() { return {1, 0, 0, -1}; }
Mat2 gate_s() { return {1, 0, 0, cx(0, 1)}; }
Mat2 gate_t() { return {1, 0, 0, std::polar(1.0, M_PI / 4)}; }
Mat2 gate_sdg() { return {1, 0, 0, cx(0, -1)}; }
Mat2 gate_tdg() { return {1, 0, 0, std::polar(1.0, -M_PI / 4)}; }

Mat2 gate_rz(double t) {
  return {std::polar(1.0, -t / 2), 0, 0, std::polar(1.0, t / 2)};
}

Mat2 gate_rz_anti(double t) { return gate_x().mul(gate_rz(t)); }

std::optional<Mat2> builtin_gate(const std::string& name) {
  if (name == "H") return gate_h();
  if (name == "X") return gate_x();
  if (name == "Y") return gate_y();
  if (name == "Z") return gate_z();
  if (name == "S") return gate_s();
  if (name == "T") return gate_t();
  if (name == "Sdg") return gate_sdg();
  if (name == "Tdg") return gate_tdg();
  if (name == "I") return Mat2::identity();
  return std::nullopt;
}

Mat4 Mat4::identity() {
  Mat4 r;
  for (int i = 0; i < 4; ++i) r.m[i][i] = 1;
  return r;
}

Mat4 Mat4::mul(const Mat4& rhs) const {
  Mat4 out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      cx s = 0;
      for (int k = 0; k < 4; ++k) s += m[i][k] * rhs.m[k][j];
      out.m[i][j] = s;
    }
  return out;
}

bool Mat4::approx(const Mat4& rhs, double tol) const {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!near_zero(m[i][j] - rhs.m[i][j], tol)) return false;
  return true;
}

Mat4 cz_variant(int x, int y) {
  // Basis order |a b>: 00, 01, 10, 11. Plain CZ flips the sign of |11>;
  // CZ_xy flips |x y>. Moving the flipped state from a=1 to a=0 takes a Z
  // on qubit a, so the Z factors pair with the *cleared* index.
  Mat4 r = Mat4::identity();
  r.m[3][3] = -1;
  if (y == 0) {
    // Z on qubit a: negate |10> and |11>.
    r.m[2][2] *= -1;
    r.m[3][3] *= -1;
  }
  if (x == 0) {
    r.m[1][1] *= -1;
    r.m[3][3] *= -1;
  }
  if (x == 0 && y == 0) r = scale(r, cx(-1, 0));
  return r;
}

Mat4 kron(const Mat2& A, const Mat2& B) {
  cx a[2][2] = {{A.a, A.b}, {A.c, A.d}};
  cx b[2][2] = {{B.a, B.b}, {B.c, B.d}};
  Mat4 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          r.m[i * 2 + k][j * 2 + l] = a[i][j] * b[k][l];
  return r;
}

Mat4 scale(const Mat4& m, cx s) {
  Mat4 r = m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.m[i][j] *= s;
  return r;
}

}  // namespace qlsp
