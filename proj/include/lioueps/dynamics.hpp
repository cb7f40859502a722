// dynamics.hpp — time propagation, EP decay fits and quantum trajectories.

#pragma once

#include "lioueps/ops_core.hpp"
#include "lioueps/spectral.hpp"
#include "lioueps/superop.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace lioueps {

struct Propagation {
  std::vector<double> times;
  std::vector<Operator> states;
  /// c_i(t) = e^{λ_i t} Tr(σ_i ρ0), indexed [time][mode]; empty for propagate_expm.
  std::vector<std::vector<cplx>> mode_coefficients;

  /// Re Tr(O ρ(t)) per time.
  std::vector<double> expectation(const Operator& obs) const;
};

/// Eigenmode expansion. Throws NumericalError("use propagate_expm near EP")
/// when a defect-flagged mode carries weight |Tr(σ_i ρ0)| > 1e-12, or when
/// Σ|Tr(σ_i ρ0)| exceeds 1e6·|ρ0| (an unflagged near-coalescence).
Propagation propagate_modes(const Spectrum& spec, const Operator& rho0, std::span<const double> times);

/// exp(Lt)·vec(ρ0) by scaling and squaring; valid at EPs and for L′.
Propagation propagate_expm(const SuperOp& l, const Operator& rho0, std::span<const double> times);

/// ½‖A − B‖₁
double trace_distance(const Operator& a, const Operator& b);

struct DecayFit {
  cplx alpha;
  cplx beta;
  double residual;  // RMS residual of the (α + βt)e^{λt} fit
  double r2_poly;
  double r2_pure;   // β = 0 model
};

/// Linear least squares of signal ≈ (α + βt)e^{λ_EP t}. Requires ≥ 20
/// samples spanning ≥ 3/|Re λ_EP|.
DecayFit ep_decay_fit(std::span<const double> times, std::span<const cplx> signal, cplx lambda_ep);

struct JumpRecord {
  double time;
  int channel;
};

struct TrajectoryOptions {
  int n_traj = 1000;
  double dt = 1e-3;
  double t_max = 1.0;
  std::uint64_t seed = 0;
  int threads = 1;
  int record_every = 0;  // steps between recorded samples; 0 = automatic (≤ ~500 samples)
  std::vector<Operator> observables;  // tracked with mean and standard error
};

struct TrajectoryEnsemble {
  std::uint64_t seed = 0;
  int n_traj = 0;
  double dt = 0;
  std::vector<double> times;                      // recorded sample times
  std::vector<std::vector<JumpRecord>> jump_records;  // per trajectory
  std::vector<Operator> conditional_no_jump_state;    // normalized, per sample
  std::vector<double> survival;                       // no-jump probability, per sample
  std::vector<Operator> ensemble_average;             // per sample
  std::vector<std::vector<double>> observable_mean;   // [sample][observable]
  std::vector<std::vector<double>> observable_sem;    // standard error of the mean
};

/// First-order jump unraveling. Trajectory k draws from mt19937_64 seeded
/// with seed_seq{seed_lo, seed_hi, k_lo, k_hi}; reductions run over fixed
/// 64-trajectory chunks in index order, so results do not depend on threads.
/// Throws DomainError when dt·(max rate) > 0.05 or ψ0 is not normalized.
TrajectoryEnsemble trajectories(const LindbladModel& m, const Vector& psi0, const TrajectoryOptions& opts);

/// Largest eigenvalue of Σ Γ†Γ (the fastest total jump rate).
double max_jump_rate(const LindbladModel& m);

}  // namespace lioueps
