// ops_core.cpp — Hilbert spaces, dense operators, Hilbert–Schmidt geometry.

#include "lioueps/ops_core.hpp"

#include "lioueps/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lioueps {

namespace {

void require_same_space(const Operator& a, const Operator& b, const char* what) {
  if (!(a.space() == b.space())) {
    throw DomainError(std::string(what) + ": operators live on different Hilbert spaces");
  }
}

}  // namespace

// ------------------------------- HilbertSpace -------------------------------

HilbertSpace::HilbertSpace(std::vector<int> dims, std::vector<std::vector<std::string>> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.empty()) throw DomainError("HilbertSpace: at least one factor required");
  dim_ = 1;
  for (int d : dims_) {
    if (d < 1) throw DomainError("HilbertSpace: factor dimension must be >= 1");
    dim_ *= d;
  }
  if (labels_.empty()) {
    labels_.resize(dims_.size());
    for (std::size_t f = 0; f < dims_.size(); ++f) {
      for (int k = 0; k < dims_[f]; ++k) labels_[f].push_back(std::to_string(k));
    }
  }
  if (labels_.size() != dims_.size()) throw DomainError("HilbertSpace: one label list per factor");
  for (std::size_t f = 0; f < dims_.size(); ++f) {
    if (static_cast<int>(labels_[f].size()) != dims_[f]) {
      throw DomainError("HilbertSpace: label count does not match factor dimension");
    }
  }
}

HilbertSpace HilbertSpace::qubit() { return HilbertSpace({2}, {{"g", "e"}}); }

HilbertSpace HilbertSpace::boson(int levels) {
  if (levels < 2) throw DomainError("degenerate space: boson mode needs levels >= 2");
  return HilbertSpace({levels});
}

std::vector<int> HilbertSpace::multi_index(int flat) const {
  if (flat < 0 || flat >= dim_) throw DomainError("HilbertSpace: basis index out of range");
  std::vector<int> out(dims_.size());
  for (int f = num_factors() - 1; f >= 0; --f) {
    out[f] = flat % dims_[f];
    flat /= dims_[f];
  }
  return out;
}

int HilbertSpace::flat_index(std::span<const int> multi) const {
  if (static_cast<int>(multi.size()) != num_factors()) {
    throw DomainError("HilbertSpace: multi-index has wrong number of factors");
  }
  int flat = 0;
  for (int f = 0; f < num_factors(); ++f) {
    if (multi[f] < 0 || multi[f] >= dims_[f]) throw DomainError("HilbertSpace: multi-index out of range");
    flat = flat * dims_[f] + multi[f];
  }
  return flat;
}

std::string HilbertSpace::basis_label(int flat) const {
  const auto mi = multi_index(flat);
  std::string out = "|";
  for (int f = 0; f < num_factors(); ++f) {
    if (f) out += ",";
    out += labels_[f][mi[f]];
  }
  return out + ">";
}

HilbertSpace HilbertSpace::tensor(const HilbertSpace& other) const {
  auto d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  auto l = labels_;
  l.insert(l.end(), other.labels_.begin(), other.labels_.end());
  return HilbertSpace(std::move(d), std::move(l));
}

// --------------------------------- Operator ---------------------------------

Operator::Operator(HilbertSpace space, Matrix entries) : space_(std::move(space)), m_(std::move(entries)) {
  if (m_.rows() != space_.dim() || m_.cols() != space_.dim()) {
    throw DomainError("Operator: matrix shape does not match Hilbert space dimension");
  }
  if (!m_.allFinite()) throw DomainError("Operator: entries must be finite");
}

Operator Operator::identity(const HilbertSpace& space) {
  return Operator(space, Matrix::Identity(space.dim(), space.dim()));
}

Operator Operator::zero(const HilbertSpace& space) {
  return Operator(space, Matrix::Zero(space.dim(), space.dim()));
}

Operator Operator::outer(const HilbertSpace& space, const Vector& ket, const Vector& bra) {
  return Operator(space, ket * bra.adjoint());
}

Operator Operator::adjoint() const { return Operator(space_, m_.adjoint()); }
Operator Operator::transpose() const { return Operator(space_, m_.transpose()); }
Operator Operator::conjugate() const { return Operator(space_, m_.conjugate()); }

double Operator::max_abs() const { return m_.size() ? m_.cwiseAbs().maxCoeff() : 0.0; }

bool Operator::is_hermitian(double rel_tol) const {
  const double scale = max_abs();
  const double dev = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
  return dev <= rel_tol * scale;
}

Operator Operator::hermitian_part() const { return Operator(space_, 0.5 * (m_ + m_.adjoint())); }

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_space(*this, rhs, "operator+");
  m_ += rhs.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_space(*this, rhs, "operator-");
  m_ -= rhs.m_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  require_same_space(lhs, rhs, "operator*");
  return Operator(lhs.space_, lhs.m_ * rhs.m_);
}

Vector operator*(const Operator& lhs, const Vector& rhs) {
  if (rhs.size() != lhs.dim()) throw DomainError("operator*: vector length mismatch");
  return lhs.m_ * rhs;
}

Operator tensor(const Operator& a, const Operator& b) {
  Matrix k = Eigen::kroneckerProduct(a.matrix(), b.matrix());
  return Operator(a.space().tensor(b.space()), std::move(k));
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }
Operator anticommutator(const Operator& a, const Operator& b) { return a * b + b * a; }

cplx hs_inner(const Operator& a, const Operator& b) {
  require_same_space(a, b, "hs_inner");
  // Tr(A† B) = sum_ij conj(A_ij) B_ij
  return (a.matrix().conjugate().cwiseProduct(b.matrix())).sum();
}

double hs_norm(const Operator& a) { return a.matrix().norm(); }

// ------------------------------ Standard sets -------------------------------

QubitOps build_qubit_ops() {
  const auto q = HilbertSpace::qubit();
  Matrix sm = Matrix::Zero(2, 2);
  sm(0, 1) = 1.0;  // |g><e|
  Matrix sp = sm.adjoint();
  Matrix sx = sp + sm;
  Matrix sy = kI * (sp - sm);  // [[0, -i], [i, 0]]
  Matrix id = Matrix::Identity(2, 2);
  Matrix sz = id - 2.0 * sp * sm;
  return {Operator(q, sx), Operator(q, sy), Operator(q, sz),
          Operator(q, sp), Operator(q, sm), Operator(q, id)};
}

BosonOps build_boson_ops(int levels) {
  const auto space = HilbertSpace::boson(levels);
  Matrix a = Matrix::Zero(levels, levels);
  for (int k = 1; k < levels; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  Matrix n = Matrix::Zero(levels, levels);
  for (int k = 0; k < levels; ++k) n(k, k) = static_cast<double>(k);
  return {Operator(space, a), Operator(space, a.adjoint()), Operator(space, n),
          Operator::identity(space)};
}

// ------------------------- Hermitian decomposition --------------------------

Operator HermitianDecomposition::reconstruct() const {
  Matrix m = Matrix::Zero(space.dim(), space.dim());
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    m += eigenvalues[k] * eigenvectors[k] * eigenvectors[k].adjoint();
  }
  return Operator(space, m);
}

HermitianDecomposition hermitian_spectral_decomposition(const Operator& a, double rel_tol) {
  if (!a.is_hermitian(rel_tol)) throw DomainError("not Hermitian");
  const Matrix herm = 0.5 * (a.matrix() + a.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  if (es.info() != Eigen::Success) throw NumericalError("hermitian_spectral_decomposition: eigensolver failed");

  const int d = a.dim();
  HermitianDecomposition out{{}, {}, a.space()};
  out.eigenvalues.reserve(d);
  out.eigenvectors.reserve(d);
  // Eigen sorts ascending; we report descending.
  for (int k = d - 1; k >= 0; --k) {
    Vector v = es.eigenvectors().col(k);
    // Phase: the first component of (near-)maximal modulus is real positive.
    const double vmax = v.cwiseAbs().maxCoeff();
    for (int j = 0; j < d; ++j) {
      if (std::abs(v(j)) >= vmax * (1.0 - 1e-9)) {
        v *= std::conj(v(j)) / std::abs(v(j));
        break;
      }
    }
    out.eigenvalues.push_back(es.eigenvalues()(k));
    out.eigenvectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace lioueps
