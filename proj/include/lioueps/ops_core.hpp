// ops_core.hpp — Hilbert spaces, dense operators, Hilbert–Schmidt geometry.
//
// Every operator carries the HilbertSpace it lives on so that tensor
// products, inner products and superoperator assembly can reject
// mismatched inputs instead of silently multiplying the wrong matrices.
// Units: rates and energies share one angular-frequency unit (hbar = 1).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace lioueps {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Product of finite-dimensional factors. Basis index <-> multi-index is
/// row-major over factors (the last factor varies fastest).
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims,
                        std::vector<std::vector<std::string>> labels = {});

  static HilbertSpace qubit();
  static HilbertSpace boson(int levels);

  int dim() const noexcept { return dim_; }
  int num_factors() const noexcept { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const std::vector<std::vector<std::string>>& labels() const noexcept { return labels_; }

  std::vector<int> multi_index(int flat) const;
  int flat_index(std::span<const int> multi) const;
  std::string basis_label(int flat) const;

  /// Composite space with factors concatenated.
  HilbertSpace tensor(const HilbertSpace& other) const;

  bool operator==(const HilbertSpace& other) const noexcept { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::vector<std::string>> labels_;
  int dim_ = 1;
};

/// Dense complex D×D operator on a HilbertSpace. Entries are finite.
class Operator {
 public:
  Operator(HilbertSpace space, Matrix entries);

  static Operator identity(const HilbertSpace& space);
  static Operator zero(const HilbertSpace& space);
  /// |ket><bra|
  static Operator outer(const HilbertSpace& space, const Vector& ket, const Vector& bra);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return m_; }
  int dim() const noexcept { return space_.dim(); }
  cplx operator()(int row, int col) const { return m_(row, col); }

  Operator adjoint() const;
  Operator transpose() const;
  Operator conjugate() const;
  cplx trace() const { return m_.trace(); }
  double max_abs() const;

  /// Entrywise check |A - A†| <= rel_tol * max|A| (absolute 0 for A = 0).
  bool is_hermitian(double rel_tol = 1e-12) const;
  /// (A + A†)/2
  Operator hermitian_part() const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
  friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);
  friend Vector operator*(const Operator& lhs, const Vector& rhs);

 private:
  HilbertSpace space_;
  Matrix m_;
};

Operator tensor(const Operator& a, const Operator& b);
Operator commutator(const Operator& a, const Operator& b);
Operator anticommutator(const Operator& a, const Operator& b);

/// <A|B> = Tr(A† B)
cplx hs_inner(const Operator& a, const Operator& b);
double hs_norm(const Operator& a);

struct QubitOps {
  Operator sx, sy, sz, sp, sm, id;
};

/// Basis (|g>, |e>) with sigma_minus = |g><e|, so sz = I - 2 sp sm = diag(+1, -1).
QubitOps build_qubit_ops();

struct BosonOps {
  Operator a, adag, n, id;
};

/// Hard-truncated ladder operators on `levels` Fock states (levels >= 2).
BosonOps build_boson_ops(int levels);

struct HermitianDecomposition {
  std::vector<double> eigenvalues;  // descending
  std::vector<Vector> eigenvectors; // orthonormal, paired with eigenvalues
  HilbertSpace space;

  Operator reconstruct() const;
};

/// Spectral decomposition of a Hermitian operator; eigenvalues descending.
/// Throws DomainError("not Hermitian") beyond the relative tolerance.
HermitianDecomposition hermitian_spectral_decomposition(const Operator& a,
                                                        double rel_tol = 1e-12);

}  // namespace lioueps
