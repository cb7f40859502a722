// dynamics.cpp

#include "lioueps/dynamics.hpp"

#include "lioueps/errors.hpp"
#include "lioueps/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace lioueps {

namespace {

void require_times(std::span<const double> times) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0) throw DomainError("times must be finite and >= 0");
    if (i && times[i] < times[i - 1]) throw DomainError("times must be non-decreasing");
  }
}

// Tr(σ ρ) without forming the product.
cplx trace_product(const Matrix& a, const Matrix& b) { return a.transpose().cwiseProduct(b).sum(); }

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<double> Propagation::expectation(const Operator& obs) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(trace_product(obs.matrix(), s.matrix()).real());
  return out;
}

Propagation propagate_modes(const Spectrum& spec, const Operator& rho0, std::span<const double> times) {
  require_times(times);
  if (!(rho0.space() == spec.space)) throw DomainError("propagate_modes: ρ0 lives on a different space");
  const int n = spec.size();
  std::vector<cplx> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = trace_product(spec.left[i].matrix(), rho0.matrix());
    if (spec.defect[i] && std::abs(w[i]) > 1e-12) throw NumericalError("use propagate_expm near EP");
  }
  // Near (not at) an EP the pair is not flagged, but its weights blow up and cancel.
  double amplification = 0;
  for (const cplx& x : w) amplification += std::abs(x);
  amplification /= std::max(hs_norm(rho0), 1e-300);
  if (amplification > 1e6) {
    char buf[120];
    std::snprintf(buf, sizeof buf, "use propagate_expm near EP (mode weights amplify |rho0| by %.3g)", amplification);
    throw NumericalError(buf);
  }
  Propagation p;
  p.times.assign(times.begin(), times.end());
  const int d = spec.space.dim();
  for (double t : times) {
    std::vector<cplx> c(n);
    Matrix rho = Matrix::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      c[i] = std::exp(spec.eigenvalues[i] * t) * w[i];
      rho += c[i] * spec.right[i].matrix();
    }
    p.mode_coefficients.push_back(std::move(c));
    p.states.emplace_back(spec.space, std::move(rho));
  }
  return p;
}

Propagation propagate_expm(const SuperOp& l, const Operator& rho0, std::span<const double> times) {
  require_times(times);
  if (!(rho0.space() == l.space())) throw DomainError("propagate_expm: ρ0 lives on a different space");
  const Vector v0 = vectorize(rho0);
  Propagation p;
  p.times.assign(times.begin(), times.end());
  for (double t : times) {
    const Matrix prop = (l.matrix() * cplx(t, 0)).exp();
    p.states.push_back(devectorize(prop * v0, l.space()));
  }
  return p;
}

double trace_distance(const Operator& a, const Operator& b) {
  if (!(a.space() == b.space())) throw DomainError("trace_distance: different spaces");
  return 0.5 * Eigen::JacobiSVD<Matrix>(a.matrix() - b.matrix()).singularValues().sum();
}

DecayFit ep_decay_fit(std::span<const double> times, std::span<const cplx> signal, cplx lambda_ep) {
  const int n = static_cast<int>(times.size());
  if (n != static_cast<int>(signal.size())) throw DomainError("ep_decay_fit: times and signal differ in length");
  if (n < 20) throw DomainError("ep_decay_fit: degenerate sampling (need >= 20 points)");
  for (int i = 1; i < n; ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("ep_decay_fit: degenerate sampling (times must increase)");
  if (!(lambda_ep.real() < 0)) throw DomainError("ep_decay_fit: λ_EP must decay (Re λ < 0)");
  const double span = times[n - 1] - times[0];
  if (span < 3.0 / std::abs(lambda_ep.real()))
    throw DomainError("ep_decay_fit: degenerate sampling (window shorter than 3 decay times)");

  Matrix a(n, 2);
  Vector y(n);
  for (int i = 0; i < n; ++i) {
    const cplx e = std::exp(lambda_ep * times[i]);
    a(i, 0) = e;
    a(i, 1) = times[i] * e;
    y(i) = signal[i];
  }
  const cplx mean = y.mean();
  const double ss_tot = (y.array() - mean).abs2().sum();
  if (!(ss_tot > 0)) throw DomainError("ep_decay_fit: constant signal");

  const Vector c2 = a.colPivHouseholderQr().solve(y);
  const Vector c1 = a.leftCols(1).colPivHouseholderQr().solve(y);
  const double ss2 = (a * c2 - y).squaredNorm();
  const double ss1 = (a.leftCols(1) * c1 - y).squaredNorm();
  return {c2(0), c2(1), std::sqrt(ss2 / n), 1.0 - ss2 / ss_tot, 1.0 - ss1 / ss_tot};
}

double max_jump_rate(const LindbladModel& m) {
  Matrix acc = Matrix::Zero(m.space().dim(), m.space().dim());
  for (const auto& g : m.jump_operators()) acc += g.matrix().adjoint() * g.matrix();
  if (m.jumps().empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(acc, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

TrajectoryEnsemble trajectories(const LindbladModel& m, const Vector& psi0, const TrajectoryOptions& opts) {
  const int d = m.space().dim();
  if (psi0.size() != d) throw DomainError("trajectories: ψ0 has the wrong dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw DomainError("trajectories: ψ0 must be normalized");
  if (opts.n_traj < 1) throw DomainError("trajectories: n_traj must be >= 1");
  if (!(opts.dt > 0) || !std::isfinite(opts.dt)) throw DomainError("trajectories: dt must be > 0");
  if (!(opts.t_max > 0) || !std::isfinite(opts.t_max)) throw DomainError("trajectories: t_max must be > 0");
  const double rate = max_jump_rate(m);
  if (opts.dt * rate > 0.05) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "trajectories: dt too large (dt*max_rate = %.3g > 0.05); use dt <= %.3g",
                  opts.dt * rate, 0.05 / rate);
    throw DomainError(buf);
  }
  for (const auto& o : opts.observables)
    if (!(o.space() == m.space())) throw DomainError("trajectories: observable lives on a different space");

  const long long steps = std::llround(opts.t_max / opts.dt);
  if (steps < 1) throw DomainError("trajectories: t_max shorter than one step");
  const int every = opts.record_every > 0 ? opts.record_every : static_cast<int>(std::max(1LL, (steps + 499) / 500));
  std::vector<long long> rec_steps;
  for (long long k = 0; k <= steps; k += every) rec_steps.push_back(k);
  if (rec_steps.back() != steps) rec_steps.push_back(steps);
  const int ns = static_cast<int>(rec_steps.size());
  const int nobs = static_cast<int>(opts.observables.size());

  const std::vector<Operator> gam = m.jump_operators();
  const int nch = static_cast<int>(gam.size());
  std::vector<Matrix> gg;
  for (const auto& g : gam) gg.push_back(g.matrix().adjoint() * g.matrix());
  const Matrix step_nj = Matrix::Identity(d, d) - cplx(0, opts.dt) * effective_hamiltonian(m).matrix();

  TrajectoryEnsemble out;
  out.seed = opts.seed;
  out.n_traj = opts.n_traj;
  out.dt = opts.dt;
  for (long long k : rec_steps) out.times.push_back(static_cast<double>(k) * opts.dt);

  // Deterministic no-jump branch and its survival probability.
  {
    Vector psi = psi0;
    double surv = 1.0;
    int r = 0;
    for (long long k = 0; k <= steps; ++k) {
      if (r < ns && rec_steps[r] == k) {
        out.conditional_no_jump_state.push_back(Operator::outer(m.space(), psi, psi));
        out.survival.push_back(surv);
        ++r;
      }
      if (k == steps) break;
      double p = 0;
      for (const auto& g : gg) p += opts.dt * psi.dot(g * psi).real();
      surv *= std::max(0.0, 1.0 - p);
      psi = (step_nj * psi).normalized();
    }
  }

  // Stochastic ensemble, reduced over fixed chunks.
  constexpr int kChunk = 64;
  const int nchunks = (opts.n_traj + kChunk - 1) / kChunk;
  struct Partial {
    std::vector<Matrix> rho;
    std::vector<std::vector<double>> s1, s2;
  };
  std::vector<Partial> parts(nchunks);
  out.jump_records.resize(opts.n_traj);

  parallel_for(nchunks, opts.threads, [&](int c) {
    Partial& pt = parts[c];
    pt.rho.assign(ns, Matrix::Zero(d, d));
    pt.s1.assign(ns, std::vector<double>(nobs, 0.0));
    pt.s2.assign(ns, std::vector<double>(nobs, 0.0));
    const int lo = c * kChunk, hi = std::min(opts.n_traj, lo + kChunk);
    std::vector<double> p(nch);
    for (int tr = lo; tr < hi; ++tr) {
      std::seed_seq ss{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                       static_cast<std::uint32_t>(tr), static_cast<std::uint32_t>(static_cast<std::uint64_t>(tr) >> 32)};
      std::mt19937_64 rng(ss);
      Vector psi = psi0;
      auto& jumps = out.jump_records[tr];
      int r = 0;
      for (long long k = 0; k <= steps; ++k) {
        if (r < ns && rec_steps[r] == k) {
          pt.rho[r] += psi * psi.adjoint();
          for (int o = 0; o < nobs; ++o) {
            const double e = psi.dot(opts.observables[o].matrix() * psi).real();
            pt.s1[r][o] += e;
            pt.s2[r][o] += e * e;
          }
          ++r;
        }
        if (k == steps) break;
        double total = 0;
        for (int ch = 0; ch < nch; ++ch) total += (p[ch] = opts.dt * psi.dot(gg[ch] * psi).real());
        const double u = uniform01(rng);
        if (u < total) {
          int ch = 0;
          double acc = p[0];
          while (ch + 1 < nch && u >= acc) acc += p[++ch];
          psi = (gam[ch].matrix() * psi).normalized();
          jumps.push_back({static_cast<double>(k + 1) * opts.dt, ch});
        } else {
          psi = (step_nj * psi).normalized();
        }
      }
    }
  });

  const double n = opts.n_traj;
  out.ensemble_average.reserve(ns);
  out.observable_mean.assign(ns, std::vector<double>(nobs, 0.0));
  out.observable_sem.assign(ns, std::vector<double>(nobs, 0.0));
  for (int r = 0; r < ns; ++r) {
    Matrix acc = Matrix::Zero(d, d);
    std::vector<double> s1(nobs, 0.0), s2(nobs, 0.0);
    for (const auto& pt : parts) {
      acc += pt.rho[r];
      for (int o = 0; o < nobs; ++o) {
        s1[o] += pt.s1[r][o];
        s2[o] += pt.s2[r][o];
      }
    }
    out.ensemble_average.emplace_back(m.space(), acc / n);
    for (int o = 0; o < nobs; ++o) {
      const double mean = s1[o] / n;
      const double var = n > 1 ? std::max(0.0, (s2[o] - n * mean * mean) / (n - 1)) : 0.0;
      out.observable_mean[r][o] = mean;
      out.observable_sem[r][o] = std::sqrt(var / n);
    }
  }
  return out;
}

}  // namespace lioueps
