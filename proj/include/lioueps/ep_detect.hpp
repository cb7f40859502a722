// ep_detect.hpp — parameter sweeps, branch continuation, EP localization
// and Jordan-chain extraction.
//
// Three operators can be swept: the full Liouvillian L, the no-jump
// Liouvillian L′ and the effective Hamiltonian H_eff. Branch ids are the
// sorted-spectrum indices at the first grid point; later points are matched
// greedily by maximal eigenvector overlap.

#pragma once

#include "lioueps/ops_core.hpp"
#include "lioueps/spectral.hpp"
#include "lioueps/superop.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lioueps {

enum class OperatorKind { Liouvillian, NoJump, Nhh };

const char* to_string(OperatorKind k);
/// "liouvillian" | "no_jump" | "nhh"; throws DomainError otherwise.
OperatorKind operator_kind_from_string(const std::string& s);

using Family = std::function<LindbladModel(double)>;

/// Dense matrix of the selected operator (D²×D² for L, L′; D×D for H_eff).
Matrix operator_matrix(const LindbladModel& m, OperatorKind kind);

/// Sorted eigenvalues (and unit eigenvectors when requested) of one operator.
/// Liouvillian kinds sort by |Re λ| then Im λ; H_eff by Re h then Im h.
struct EigenPoint {
  std::vector<cplx> values;
  std::vector<Vector> vectors;
  double scale = 1.0;  // max(1, max |M_ij|)
};
EigenPoint eigen_point(const Matrix& op, OperatorKind kind, bool want_vectors = true);

struct SweepResult {
  OperatorKind kind = OperatorKind::Liouvillian;
  std::vector<double> grid;
  int n_branches = 0;
  // Indexed [grid point][branch id].
  std::vector<std::vector<cplx>> values;
  std::vector<std::vector<Vector>> vectors;
  std::vector<std::vector<int>> assignment;         // branch -> sorted index at that point
  std::vector<std::vector<double>> matching_quality;  // overlap with the previous step; 1 at the first point
  std::vector<int> breaks;                          // grid indices where some branch matched below 0.5
  std::vector<double> scale;                        // operator scale per grid point

  /// Eigenvalue track of one branch over the grid.
  std::vector<cplx> track(int branch) const;
};

/// Evaluates every grid point (concurrently when threads > 1) and matches
/// branches sequentially. Model build errors are rethrown with the grid
/// index attached.
SweepResult sweep(const Family& family, std::span<const double> grid, OperatorKind kind = OperatorKind::Liouvillian,
                  int threads = 1);

/// |Tr(ρ_i†ρ_j)| for HS-normalized right eigenmatrices.
Eigen::MatrixXd overlap_matrix(const Spectrum& spec);
/// |v_i†v_j| for unit vectors.
Eigen::MatrixXd overlap_matrix(const std::vector<Vector>& vectors);

struct JordanChain {
  Vector head;         // ρ1 (unit), phase-aligned with the supplied guess
  Vector generalized;  // ρ2 (unit), orthogonal to ρ1
  cplx coefficient;    // A in (M − λ)ρ2 = A ρ1
  double residual;     // |(M − λ)ρ2 − Aρ1|
  int order_estimate;  // saturated dim ker (M − λ)^k
  std::vector<int> kernel_dims;  // dim ker (M − λ)^k, k = 1, 2, ...
};

/// Generalized eigenvector of a generic square matrix. Singular values below
/// rank_tol·σ_max(M) count as zero; exactly one is required.
JordanChain jordan_chain(const Matrix& m, cplx lambda, const Vector& head_guess, double rank_tol = 1e-8);

struct OperatorJordanChain {
  Operator rho1;
  Operator rho2;
  cplx coefficient;
  double residual;
  int order_estimate;
};
OperatorJordanChain jordan_chain(const SuperOp& l, cplx lambda, const Operator& rho1, double rank_tol = 1e-8);

struct EpOptions {
  int scan_points = 64;
  double param_tol = 1e-14;   // bisection width (relative to max(1, |g|))
  double rank_tol = 1e-8;
  double overlap_peak = 0.9;  // fallback trigger for brackets without a sign change
  double gap_tol = 1e-6;      // relative to scale, accepted gap for the golden-section route
  int threads = 1;
};

struct EPReport {
  OperatorKind kind = OperatorKind::Liouvillian;
  double param_value = 0;
  std::pair<int, int> branch_pair{0, 1};
  cplx lambda_ep{0, 0};
  double gap = 0;             // |λ_a − λ_b| at param_value
  double overlap_at_ep = 0;   // |⟨v_a|v_b⟩|
  int order_estimate = 0;
  cplx jordan_coefficient{0, 0};
  double jordan_residual = 0;
  Vector eigenvector;         // ρ1 / φ1 (vectorized for L, L′)
  Vector generalized;         // ρ2 / φ2, unit norm
  std::optional<Operator> eigenmatrix;              // L, L′ only
  std::optional<Operator> generalized_eigenmatrix;  // L, L′ only
  std::string method;         // "bisection" | "golden"
  int iterations = 0;
};

/// Locates an EP of branches (i, j) (sorted indices at bracket.first) inside
/// the bracket. Throws NumericalError("no EP bracketed …") when neither the
/// discriminant changes sign nor an overlap peak exists, and whenever one of
/// the branches is the zero-eigenvalue branch of a Liouvillian.
EPReport locate_ep(const Family& family, OperatorKind kind, std::pair<int, int> branch_pair,
                   std::pair<double, double> bracket, const EpOptions& opts = {});

/// Branch pairs whose discriminant changes sign inside the bracket, slowest
/// decaying first (ties by index). Empty when there is none.
std::vector<std::pair<int, int>> candidate_branch_pairs(const Family& family, OperatorKind kind,
                                                        std::pair<double, double> bracket, const EpOptions& opts = {});

/// Σ (λ_k − λ̄)² over a cluster; real-valued on both sides of a
/// PT-like coalescence and zero at the EP.
cplx cluster_discriminant(std::span<const cplx> values);

/// Bisection on the sign of Re f over [lo, hi]; f(lo) and f(hi) must differ
/// in sign. Returns the midpoint of the final interval.
double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14,
                          int max_iter = 200);

}  // namespace lioueps
