// superop.hpp — Lindblad models and their superoperator matrices.
//
// Vectorization is row-major: vec(|m><n|) sits at index m*D + n, so
// vec(O A P) = (O ⊗ Pᵀ) vec(A). Every SuperOp is tagged with this
// convention. Rates are folded into jump operators as Γ = sqrt(γ)·X and
// used in the unit-normalized dissipator D[Γ] = Γ·Γ† − ½{Γ†Γ, ·}.

#pragma once

#include "lioueps/ops_core.hpp"

#include <string_view>
#include <vector>

namespace lioueps {

struct Jump {
  double rate;  // γ >= 0
  Operator op;  // X; the effective jump operator is sqrt(γ)·X
};

class LindbladModel {
 public:
  LindbladModel(Operator hamiltonian, std::vector<Jump> jumps, double herm_rel_tol = 1e-12);

  const HilbertSpace& space() const noexcept { return h_.space(); }
  const Operator& hamiltonian() const noexcept { return h_; }
  const std::vector<Jump>& jumps() const noexcept { return jumps_; }

  /// Γ_μ = sqrt(γ_μ)·X_μ
  std::vector<Operator> jump_operators() const;

 private:
  Operator h_;
  std::vector<Jump> jumps_;
};

class SuperOp {
 public:
  static constexpr std::string_view kConvention = "vec-rowmajor";

  SuperOp(HilbertSpace space, Matrix entries);
  static SuperOp identity(const HilbertSpace& space);

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return m_; }
  int hilbert_dim() const noexcept { return space_.dim(); }
  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  std::string_view convention() const noexcept { return kConvention; }

  Operator apply(const Operator& rho) const;
  /// Matrix of the Hilbert–Schmidt adjoint superoperator (conjugate transpose).
  SuperOp adjoint() const;

  SuperOp& operator+=(const SuperOp& rhs);
  SuperOp& operator-=(const SuperOp& rhs);
  SuperOp& operator*=(cplx s);
  friend SuperOp operator+(SuperOp lhs, const SuperOp& rhs) { return lhs += rhs; }
  friend SuperOp operator-(SuperOp lhs, const SuperOp& rhs) { return lhs -= rhs; }
  friend SuperOp operator*(cplx s, SuperOp rhs) { return rhs *= s; }
  friend SuperOp operator*(const SuperOp& lhs, const SuperOp& rhs);

 private:
  HilbertSpace space_;
  Matrix m_;
};

Vector vectorize(const Operator& a);
Operator devectorize(const Vector& v, const HilbertSpace& space);
/// Infers a single-factor space of dimension sqrt(len); throws on non-square length.
Operator devectorize(const Vector& v);

/// O ⊗ I : ρ ↦ Oρ
SuperOp left_action(const Operator& o);
/// I ⊗ Oᵀ : ρ ↦ ρO
SuperOp right_action(const Operator& o);

/// Γ⊗Γ* − ½(Γ†Γ ⊗ I) − ½(I ⊗ ΓᵀΓ*)
SuperOp dissipator_superop(const Operator& gamma);
/// Γ⊗Γ* : ρ ↦ ΓρΓ†
SuperOp jump_superop(const Operator& gamma);

SuperOp assemble_liouvillian(const LindbladModel& m);
/// L′ = −i(H_eff ⊗ I − I ⊗ H_eff^*) ; L without the jump terms.
SuperOp assemble_liouvillian_no_jumps(const LindbladModel& m);
/// H_eff = H − (i/2) Σ Γ†Γ
Operator effective_hamiltonian(const LindbladModel& m);

/// Lρ evaluated directly on operators, without forming the D²×D² matrix.
Operator apply_liouvillian(const LindbladModel& m, const Operator& rho);
/// L†X in the Hilbert–Schmidt sense (Heisenberg picture generator).
Operator apply_adjoint_liouvillian(const LindbladModel& m, const Operator& x);

/// max |(vec(I)† L)_k|; zero for a trace-preserving generator.
double trace_preservation_defect(const SuperOp& l);

/// One Kraus step M0 ρ M0† + τ ΓρΓ† with M0 = I − iτH_eff. Single-jump models only.
Operator kraus_step(const LindbladModel& m, const Operator& rho, double tau);

}  // namespace lioueps
