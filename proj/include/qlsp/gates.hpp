// Single-qubit gate algebra: 2x2 unitaries, the diagonal/antidiagonal/general
// classification that drives compaction and dependence pruning, and the
// algebra of pushing X-like gates through controlled-Z.
#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qlsp {

using cx = std::complex<double>;

constexpr double kMatTol = 1e-9;

// Row-major 2x2 complex matrix.
struct Mat2 {
  cx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};  // [[a b], [c d]]

  static Mat2 identity() { return {}; }
  Mat2 mul(const Mat2& rhs) const;  // this * rhs
  Mat2 dagger() const;
  bool approx(const Mat2& rhs, double tol = kMatTol) const;
  bool approx_up_to_phase(const Mat2& rhs, double tol = kMatTol) const;
};

enum class MatClass { Diagonal, AntiDiagonal, General };

MatClass classify(const Mat2& m, double tol = kMatTol);

// Product class when only the factor classes are known. General absorbs
// everything; antidiagonals compose like signs (anti*anti = diag).
MatClass compose_class(MatClass first, MatClass then);

// True for matrices equal to identity up to global phase; such gates are
// dropped after merging.
bool is_identity_up_to_phase(const Mat2& m, double tol = kMatTol);

// Named gates usable in source programs.
std::optional<Mat2> builtin_gate(const std::string& name);
Mat2 gate_h();
Mat2 gate_x();
Mat2 gate_y();
Mat2 gate_z();
Mat2 gate_s();
Mat2 gate_t();
Mat2 gate_sdg();
Mat2 gate_tdg();
Mat2 gate_rz(double theta);       // diag(e^{-i t/2}, e^{i t/2})
Mat2 gate_rz_anti(double theta);  // X * rz(theta): the generic antidiagonal

// --- two-qubit helpers (tests and the conjugation rules) ----------------

// Row-major 4x4 on (qubit a, qubit b) ordered |a b>.
struct Mat4 {
  cx m[4][4] = {};
  static Mat4 identity();
  Mat4 mul(const Mat4& rhs) const;
  bool approx(const Mat4& rhs, double tol = kMatTol) const;
};

// Signed controlled-Z family: cz_variant(x,y) flips the phase of basis
// state |x y>. The plain CZ is cz_variant(1,1); cz_variant(x,y) ==
// (Z_a if y==0) (Z_b if x==0) * CZ * (-1 if x==0 and y==0).
Mat4 cz_variant(int x, int y);
Mat4 kron(const Mat2& on_a, const Mat2& on_b);
Mat4 scale(const Mat4& m, cx s);

}  // namespace qlsp
