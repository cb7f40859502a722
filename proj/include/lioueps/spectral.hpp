// spectral.hpp — Liouvillian and NHH eigendecompositions.
//
// A Spectrum holds right eigenmatrices ρ_i (HS norm 1) and left
// eigenmatrices σ_i scaled so that Tr(σ_i ρ_j) = δ_ij. Eigenvalues are
// sorted by |Re λ| ascending, then Im λ ascending, then lexicographically
// on the phase-fixed eigenmatrix entries. Pairs whose biorthonormalization
// is ill-conditioned (near an exceptional point) carry a defect flag
// instead of being force-normalized.

#pragma once

#include "lioueps/ops_core.hpp"
#include "lioueps/superop.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lioueps {

struct SpectralOptions {
  /// Eigenvalues closer than cluster_tol·scale are treated as one degenerate cluster.
  double cluster_tol = 1e-8;
  /// |λ| <= zero_tol·scale counts as a zero eigenvalue.
  double zero_tol = 1e-10;
  /// |Tr(σρ)| < defect_tol·|σ||ρ| flags the pair as near-defective.
  double defect_tol = 1e-10;
  /// Sort-key quantum (relative to scale) for the |Re λ| and Im λ keys.
  double sort_tol = 1e-9;
};

struct Spectrum {
  HilbertSpace space;
  std::vector<cplx> eigenvalues;
  std::vector<Operator> right;  // ρ_i, HS norm 1
  std::vector<Operator> left;   // σ_i, Tr(σ_i ρ_j) = δ_ij
  std::vector<bool> defect;     // biorthonormalization failed for this index
  std::vector<int> zero_indices;
  std::optional<Operator> steady_state;
  double scale = 1.0;  // max(1, max |L_ij|), used for relative tolerances

  int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
  bool any_defect() const;
};

/// Full biorthonormal eigendecomposition of an arbitrary superoperator
/// (no trace-preservation requirement; usable for L′).
Spectrum diagonalize_superop(const SuperOp& l, const SpectralOptions& opts = {});

/// diagonalize_superop plus steady-state extraction. Throws NumericalError
/// when no zero eigenvalue exists.
Spectrum analyze_liouvillian(const SuperOp& l, const SpectralOptions& opts = {});

struct InducedPair {
  cplx lambda;  // −i(h_l − h_m*)
  int l;
  int m;
};

struct NhhSpectrum {
  HilbertSpace space;
  std::vector<cplx> h;          // sorted by Re h, then Im h
  std::vector<Vector> phi;      // unit right eigenvectors
  double condition_number = 1;  // of the eigenvector matrix
  bool near_defective = false;
  std::vector<InducedPair> induced;  // all D² pairs, (l, m) row-major

  /// |φ_l><φ_m|
  Operator induced_eigenmatrix(int l, int m) const;
};

NhhSpectrum analyze_nhh(const Operator& h_eff, double defect_condition = 1e8);

struct PmDecomposition {
  Operator plus;         // trace-1 PSD
  Operator minus;        // trace-1 PSD
  double weight_plus;    // ρ = weight_plus·plus − weight_minus·minus
  double weight_minus;
};

/// ρ ∝ ρ⁺ − ρ⁻ from the positive/negative parts of a Hermitian ρ.
PmDecomposition pm_decomposition(const Operator& rho, double herm_rel_tol = 1e-8);

/// (ρ + ρ†, i(ρ − ρ†))
std::pair<Operator, Operator> sym_antisym(const Operator& rho);

struct LemmaCheck {
  std::string name;
  bool applicable = true;
  bool passed = false;
  double worst = 0.0;  // worst residual / deviation observed
  std::string detail;
};

struct LemmaReport {
  std::vector<LemmaCheck> checks;
  bool all_passed() const;
  const LemmaCheck& get(const std::string& name) const;
};

struct LemmaOptions {
  double t_evolve = 0.1;
  double evolve_tol = 1e-8;
  double trace_tol = 1e-8;
  double pair_tol = 1e-8;
  double nhh_overlap_tol = 1e-8;
  double rank_tol = 1e-6;
};

/// L1 exp(Lt)ρ_i = e^{λt}ρ_i, L2 tracelessness, L3 conjugate pairing,
/// L4 NHH eigenmatrices when every jump commutes with H_eff, L5 zero
/// subspace non-defective, T1 no zero branch in a flagged coalescence.
LemmaReport check_lemmas(const Spectrum& spec, const LindbladModel& model, const LemmaOptions& opts = {});

/// Eigenvalues predicted by the commuting-jump formula, for both index
/// orderings of the jump-eigenvalue product. Empty when some jump does not
/// commute with H_eff.
struct CommutingPrediction {
  bool applicable = false;
  std::vector<cplx> lambda_gl_gm_conj;  // −i(h_l − h_m*) + Σ g_l g_m*
  std::vector<cplx> lambda_gm_gl_conj;  // −i(h_l − h_m*) + Σ g_m g_l*
  std::vector<Operator> eigenmatrices;  // |φ_l><φ_m|, same order
};
CommutingPrediction commuting_jump_prediction(const LindbladModel& model, double commute_tol = 1e-10);

/// Multiset distance: max over a greedy nearest matching of |a_i − b_π(i)|.
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b);

}  // namespace lioueps
