// superop.cpp — vectorization and superoperator assembly.

#include "lioueps/superop.hpp"

#include "lioueps/errors.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>

namespace lioueps {

namespace {

Matrix id_matrix(int d) { return Matrix::Identity(d, d); }

void require_same_space(const SuperOp& a, const SuperOp& b, const char* what) {
  if (!(a.space() == b.space())) throw DomainError(std::string(what) + ": superoperators on different spaces");
}

}  // namespace

// ------------------------------- LindbladModel -------------------------------

LindbladModel::LindbladModel(Operator hamiltonian, std::vector<Jump> jumps, double herm_rel_tol)
    : h_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  if (!h_.is_hermitian(herm_rel_tol)) throw DomainError("LindbladModel: Hamiltonian is not Hermitian");
  for (const auto& j : jumps_) {
    if (!(j.rate >= 0.0) || !std::isfinite(j.rate)) {
      throw DomainError("LindbladModel: jump rates must be finite and >= 0");
    }
    if (!(j.op.space() == h_.space())) throw DomainError("LindbladModel: jump operator on a different space");
  }
}

std::vector<Operator> LindbladModel::jump_operators() const {
  std::vector<Operator> out;
  out.reserve(jumps_.size());
  for (const auto& j : jumps_) out.push_back(std::sqrt(j.rate) * j.op);
  return out;
}

// ---------------------------------- SuperOp ----------------------------------

SuperOp::SuperOp(HilbertSpace space, Matrix entries) : space_(std::move(space)), m_(std::move(entries)) {
  const int d2 = space_.dim() * space_.dim();
  if (m_.rows() != d2 || m_.cols() != d2) throw DomainError("SuperOp: matrix must be D^2 x D^2");
}

SuperOp SuperOp::identity(const HilbertSpace& space) {
  const int d2 = space.dim() * space.dim();
  return SuperOp(space, Matrix::Identity(d2, d2));
}

Operator SuperOp::apply(const Operator& rho) const {
  if (!(rho.space() == space_)) throw DomainError("SuperOp::apply: operator on a different space");
  return devectorize(m_ * vectorize(rho), space_);
}

SuperOp SuperOp::adjoint() const { return SuperOp(space_, m_.adjoint()); }

SuperOp& SuperOp::operator+=(const SuperOp& rhs) {
  require_same_space(*this, rhs, "SuperOp+");
  m_ += rhs.m_;
  return *this;
}

SuperOp& SuperOp::operator-=(const SuperOp& rhs) {
  require_same_space(*this, rhs, "SuperOp-");
  m_ -= rhs.m_;
  return *this;
}

SuperOp& SuperOp::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

SuperOp operator*(const SuperOp& lhs, const SuperOp& rhs) {
  require_same_space(lhs, rhs, "SuperOp*");
  return SuperOp(lhs.space_, lhs.m_ * rhs.m_);
}

// ------------------------------- Vectorization -------------------------------

Vector vectorize(const Operator& a) {
  const int d = a.dim();
  Vector v(d * d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) v(m * d + n) = a(m, n);
  return v;
}

Operator devectorize(const Vector& v, const HilbertSpace& space) {
  const int d = space.dim();
  if (v.size() != static_cast<Eigen::Index>(d) * d) throw DomainError("devectorize: length is not D^2");
  Matrix a(d, d);
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) a(m, n) = v(m * d + n);
  return Operator(space, std::move(a));
}

Operator devectorize(const Vector& v) {
  const auto len = v.size();
  const auto d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(len))));
  if (d < 1 || static_cast<Eigen::Index>(d) * d != len) {
    throw DomainError("devectorize: vector length is not a perfect square");
  }
  return devectorize(v, HilbertSpace({d}));
}

// --------------------------------- Assembly ----------------------------------

SuperOp left_action(const Operator& o) {
  return SuperOp(o.space(), Eigen::kroneckerProduct(o.matrix(), id_matrix(o.dim())).eval());
}

SuperOp right_action(const Operator& o) {
  return SuperOp(o.space(), Eigen::kroneckerProduct(id_matrix(o.dim()), o.matrix().transpose()).eval());
}

SuperOp jump_superop(const Operator& gamma) {
  return SuperOp(gamma.space(), Eigen::kroneckerProduct(gamma.matrix(), gamma.matrix().conjugate()).eval());
}

SuperOp dissipator_superop(const Operator& gamma) {
  const Operator gdg = gamma.adjoint() * gamma;
  SuperOp out = jump_superop(gamma);
  out -= cplx(0.5) * left_action(gdg);
  out -= cplx(0.5) * right_action(gdg);
  return out;
}

Operator effective_hamiltonian(const LindbladModel& m) {
  Operator h = m.hamiltonian();
  for (const auto& g : m.jump_operators()) h -= (0.5 * kI) * (g.adjoint() * g);
  return h;
}

SuperOp assemble_liouvillian_no_jumps(const LindbladModel& m) {
  const Operator heff = effective_hamiltonian(m);
  // −i(H_eff ρ − ρ H_eff†)
  SuperOp out = left_action(heff);
  out -= right_action(heff.adjoint());
  out *= -kI;
  return out;
}

SuperOp assemble_liouvillian(const LindbladModel& m) {
  SuperOp out = left_action(m.hamiltonian());
  out -= right_action(m.hamiltonian());
  out *= -kI;
  for (const auto& g : m.jump_operators()) out += dissipator_superop(g);
  return out;
}

Operator apply_liouvillian(const LindbladModel& m, const Operator& rho) {
  const Operator heff = effective_hamiltonian(m);
  Operator out = (-kI) * (heff * rho - rho * heff.adjoint());
  for (const auto& g : m.jump_operators()) out += g * rho * g.adjoint();
  return out;
}

Operator apply_adjoint_liouvillian(const LindbladModel& m, const Operator& x) {
  // L†X = i[H, X] + Σ (Γ† X Γ − ½{Γ†Γ, X})
  Operator out = kI * commutator(m.hamiltonian(), x);
  for (const auto& g : m.jump_operators()) {
    const Operator gd = g.adjoint();
    out += gd * x * g;
    out -= cplx(0.5) * anticommutator(gd * g, x);
  }
  return out;
}

double trace_preservation_defect(const SuperOp& l) {
  const Operator id = Operator::identity(l.space());
  const Vector row = vectorize(id).adjoint() * l.matrix();
  return row.size() ? row.cwiseAbs().maxCoeff() : 0.0;
}

Operator kraus_step(const LindbladModel& m, const Operator& rho, double tau) {
  if (m.jumps().size() != 1) {
    throw DomainError("kraus_step: the minimal Kraus extension needs exactly one jump operator");
  }
  if (!(tau > 0.0)) throw DomainError("kraus_step: tau must be > 0");
  const Operator heff = effective_hamiltonian(m);
  const Operator m0 = Operator::identity(m.space()) - (tau * kI) * heff;
  const Operator g = m.jump_operators().front();
  return m0 * rho * m0.adjoint() + cplx(tau) * (g * rho * g.adjoint());
}

}  // namespace lioueps
