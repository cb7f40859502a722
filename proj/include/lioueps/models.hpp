// models.hpp — the concrete model families and their closed forms.
//
// Qubit basis is (|g>, |e>) with σ− = |g><e| and σz = diag(1, −1); two-mode
// boson states are |n_a, n_b> at flat index n_a·levels + n_b. Rates enter as
// Γ = sqrt(γ)·X, which is what makes H_eff carry −iγ/2 per unit of Γ†Γ.

#pragma once

#include "lioueps/ep_detect.hpp"
#include "lioueps/ops_core.hpp"
#include "lioueps/superop.hpp"

#include <array>
#include <map>
#include <span>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lioueps {

// ------------------------------- builders -----------------------------------

LindbladModel example1(double omega, double gamma_minus, double gamma_x, double gamma_y);
LindbladModel example2(double omega_x, double gamma_minus);
LindbladModel example3(double omega, double g, double gamma_a, double gamma_b, int levels);
LindbladModel dephasing(double omega, double gamma, int levels);

// ----------------------------- closed forms ---------------------------------

struct Example1ClosedForm {
  cplx big_omega;                   // Ω = sqrt(γx² + γy² − 2γxγy − ω²), principal branch
  std::array<cplx, 4> lambda;       // λ0 = 0, λ1,2 = −γ−/2 − γx − γy ± Ω, λ3 = −γ− − 2(γx + γy)
  std::array<std::optional<Operator>, 4> rho;  // HS-normalized; empty where the formula degenerates
};
Example1ClosedForm example1_closed_form(double omega, double gamma_minus, double gamma_x, double gamma_y);

struct Example2ClosedForm {
  cplx zeta;  // sqrt(4ωx² − γ−²)
  cplx eta;   // sqrt(γ−² − 16ωx²)
  std::array<cplx, 2> h;          // (−iγ− ∓ ζ)/4
  std::array<Vector, 2> phi;      // ∝ [iγ− ∓ ζ, 2ωx], unit norm
  std::array<cplx, 4> lambda;     // 0, −γ−/2, −3γ−/4 ± η/4
  std::array<Operator, 4> rho;    // ρ0 = ρ_ss (trace 1); ρ1..3 HS-normalized
  std::array<Vector, 2> psi2;     // Ψ2^±, unit norm (formal vectors; ρ2 is Hermitian only for γ− > 4ωx)
  std::array<Vector, 2> psi3;     // Ψ3^±
  double sigma_z_ss;              // γ−² / (γ−² + 2ωx²)
};
Example2ClosedForm example2_closed_form(double omega_x, double gamma_minus);

struct Example3OneExcitation {
  cplx theta;                 // sqrt(g² − γ²/4), γ = (γa − γb)/2
  std::array<cplx, 2> h;      // ω − iγ̄/2 ± θ
  std::array<Vector, 2> phi;  // (iγ/2 ± θ)|0,1> + g|1,0>, full-space vectors, unit norm
  double g_ep;                // |γ|/2
};
Example3OneExcitation example3_one_excitation_closed_form(double omega, double g, double gamma_a, double gamma_b,
                                                           int levels);

/// [[ω − iγa/2, g], [g, ω − iγb/2]]
Matrix example3_mean_field_closed_form(double omega, double g, double gamma_a, double gamma_b);
/// Numerical mean-field matrix K with ∂t(<a>, <b>) = −iK(<a>, <b>), read off
/// L†(a) and L†(b) on the vacuum/one-excitation matrix elements.
Matrix example3_mean_field_matrix(const LindbladModel& m, int levels);

struct ExcitationBlock {
  int excitations;
  std::vector<int> indices;  // flat basis indices
  Matrix h_eff;              // block of H_eff
};
/// Complete total-excitation blocks N = 0..levels−1 of an example-3 H_eff.
std::vector<ExcitationBlock> excitation_blocks(const Operator& h_eff, int levels);
/// Largest matrix element of H_eff between different excitation sectors.
double excitation_leakage(const Operator& h_eff, int levels);

struct BlockEp {
  int excitations;
  int size;
  double g_ep;
  double max_overlap;  // largest pairwise eigenvector overlap in the block at g_ep
};
/// EP of every complete block with ≥ 2 states, from the sign change of the
/// block's eigenvalue variance Σ(h − h̄)² = Tr B² − (Tr B)²/n inside the bracket.
std::vector<BlockEp> example3_block_eps(double omega, double gamma_a, double gamma_b, int levels,
                                        std::pair<double, double> bracket);

/// λ_mn = −iω(m−n) − (γ/2)(m−n)², row-major in (m, n).
std::vector<cplx> dephasing_closed_form(double omega, double gamma, int levels);

// --------------------------- <sigma_z> curves -------------------------------

struct SigmaZCurves {
  std::vector<double> gamma_minus;
  std::vector<std::array<double, 2>> nhh;          // <σz> on φ1, φ2
  std::vector<std::array<double, 4>> liouvillian;  // Ψ2+, Ψ2−, Ψ3+, Ψ3−
  std::vector<double> steady;                      // Tr(σz ρ_ss)
};
SigmaZCurves sigma_z_expectations(double omega_x, const std::vector<double>& gamma_minus_grid);

/// Number of distinct values (within tol) in a set of curve samples.
int distinct_count(std::span<const double> values, double tol);

// ------------------------------ registry ------------------------------------

struct ParamSpec {
  std::string name;
  double default_value;
  enum class Domain { Real, NonNegative, Positive, Levels } domain;
};

struct ModelFamily {
  std::string name;
  std::vector<ParamSpec> params;
  std::string default_sweep_param;
};

using ParamMap = std::map<std::string, double>;

const std::vector<ModelFamily>& model_families();
/// Throws DomainError listing the available families.
const ModelFamily& model_family(const std::string& name);
/// Fills defaults; throws DomainError on unknown names or domain violations.
ParamMap complete_params(const ModelFamily& fam, const ParamMap& given);
/// Domain violations of a complete parameter map, one message per field.
std::vector<std::string> param_errors(const ModelFamily& fam, const ParamMap& params);
LindbladModel build_model(const std::string& name, const ParamMap& params);
Family make_family(const std::string& name, const ParamMap& fixed, const std::string& sweep_param);
/// Closed-form Liouvillian spectrum where one is known (examples 1, 2, dephasing).
std::optional<std::vector<cplx>> closed_form_liouvillian(const std::string& name, const ParamMap& params);

}  // namespace lioueps
