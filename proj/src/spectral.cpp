// spectral.cpp — biorthonormal eigendecompositions, steady states, lemma checks.

#include "lioueps/spectral.hpp"

#include "lioueps/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lioueps {

namespace {

struct RawEig {
  std::vector<cplx> values;
  Matrix vectors;
};

RawEig eig(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m, true);
  if (es.info() != Eigen::Success) throw NumericalError("complex eigensolver did not converge");
  RawEig out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  out.vectors = es.eigenvectors();
  return out;
}

// Single-linkage clustering of eigenvalues closer than tol. Deterministic:
// clusters are listed in order of their smallest member index.
std::vector<std::vector<int>> cluster(const std::vector<cplx>& v, double tol) {
  const int n = static_cast<int>(v.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(v[i] - v[j]) <= tol) {
        const int a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<std::vector<int>> out;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[r]].push_back(i);
  }
  return out;
}

// vec(devec(v)†) for row-major vectorization.
Vector vec_dagger(const Vector& v, int d) {
  Vector out(v.size());
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) out(m * d + n) = std::conj(v(n * d + m));
  return out;
}

int first_dominant(const Vector& v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (std::abs(v(j)) >= vmax * (1.0 - 1e-9)) return static_cast<int>(j);
  return 0;
}

// Unit norm, first dominant entry real positive.
Vector phase_fixed(Vector v) {
  v.normalize();
  const int j = first_dominant(v);
  if (std::abs(v(j)) > 0) v *= std::conj(v(j)) / std::abs(v(j));
  return v;
}

// Sign convention for Hermitian eigenmatrices: positive trace when the trace
// is significant, otherwise the dominant entry has positive real part.
Vector sign_fixed_hermitian(Vector v, int d) {
  v.normalize();
  cplx tr = 0;
  for (int k = 0; k < d; ++k) tr += v(k * d + k);
  double s;
  if (std::abs(tr) > 1e-8) {
    s = tr.real();
  } else {
    const cplx x = v(first_dominant(v));
    s = std::abs(x.real()) > 1e-12 ? x.real() : x.imag();
  }
  if (s < 0) v = -v;
  return v;
}

// Columns of q (orthonormal) versus basis: max residual of projecting
// candidates onto span(basis).
double span_residual(const Matrix& basis, const Matrix& candidates) {
  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(basis.rows(), basis.cols());
  double worst = 0;
  for (Eigen::Index c = 0; c < candidates.cols(); ++c) {
    const Vector r = candidates.col(c) - q * (q.adjoint() * candidates.col(c));
    worst = std::max(worst, r.norm() / std::max(1e-300, candidates.col(c).norm()));
  }
  return worst;
}

// Orthonormal basis of Hermitian matrices spanning the same complex space as
// the columns of v (which must be closed under †). Candidates in `seed` are
// taken first. Returns fewer than k columns on failure.
Matrix hermitian_basis(const Matrix& v, int d, const std::vector<Vector>& seed = {}) {
  const int k = static_cast<int>(v.cols());
  std::vector<Vector> cands;
  for (const auto& s : seed) cands.push_back(s);
  for (int c = 0; c < k; ++c) {
    const Vector vd = vec_dagger(v.col(c), d);
    cands.push_back(0.5 * (v.col(c) + vd));
    cands.push_back(0.5 * kI * (v.col(c) - vd));
  }
  double max_norm = 0;
  for (auto& c : cands) max_norm = std::max(max_norm, c.norm());
  std::vector<Vector> accepted;
  const int n_seed = static_cast<int>(seed.size());
  std::vector<bool> used(cands.size(), false);
  while (static_cast<int>(accepted.size()) < k) {
    int best = -1;
    double best_norm = 0;
    Vector best_res;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      if (used[c]) continue;
      Vector r = cands[c];
      for (const auto& a : accepted) r -= a.dot(r).real() * a;  // real inner product on Hermitian space
      const double nr = r.norm();
      // Seeds win whenever they carry a significant new direction.
      const bool seed_pref = static_cast<int>(c) < n_seed && nr > 1e-6 * max_norm;
      if (seed_pref || nr > best_norm) {
        best = static_cast<int>(c);
        best_norm = nr;
        best_res = r;
        if (seed_pref) break;
      }
    }
    if (best < 0 || best_norm <= 1e-6 * max_norm) break;
    used[best] = true;
    accepted.push_back(sign_fixed_hermitian(best_res / best_norm, d));
  }
  Matrix out(v.rows(), static_cast<Eigen::Index>(accepted.size()));
  for (std::size_t c = 0; c < accepted.size(); ++c) out.col(c) = accepted[c];
  if (static_cast<int>(accepted.size()) == k && span_residual(v, out) > 1e-6) return Matrix(v.rows(), 0);
  return out;
}

// Complex modified Gram–Schmidt; fewer columns on rank deficiency.
Matrix complex_gs(const Matrix& v) {
  std::vector<Vector> acc;
  for (Eigen::Index c = 0; c < v.cols(); ++c) {
    Vector r = v.col(c).normalized();
    for (const auto& a : acc) r -= a.dot(r) * a;
    const double nr = r.norm();
    if (nr <= 1e-6) break;
    acc.push_back(phase_fixed(r / nr));
  }
  Matrix out(v.rows(), static_cast<Eigen::Index>(acc.size()));
  for (std::size_t c = 0; c < acc.size(); ++c) out.col(c) = acc[c];
  return out;
}

double min_singular(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

bool lex_less(const Matrix& a, const Matrix& b) {
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (a(r, c).real() != b(r, c).real()) return a(r, c).real() < b(r, c).real();
      if (a(r, c).imag() != b(r, c).imag()) return a(r, c).imag() < b(r, c).imag();
    }
  return false;
}

}  // namespace

bool Spectrum::any_defect() const { return std::any_of(defect.begin(), defect.end(), [](bool b) { return b; }); }

Spectrum diagonalize_superop(const SuperOp& l, const SpectralOptions& opts) {
  const int d = l.hilbert_dim();
  const int n = l.dim();
  const double scale = std::max(1.0, l.matrix().cwiseAbs().maxCoeff());
  const double ctol = opts.cluster_tol * scale;

  const RawEig right = eig(l.matrix());
  const RawEig left = eig(l.matrix().adjoint());

  std::vector<cplx> vals(n);
  std::vector<Vector> rv(n), lv(n);
  std::vector<bool> defect(n, false);
  std::vector<bool> left_used(n, false);

  for (const auto& cl : cluster(right.values, ctol)) {
    const int k = static_cast<int>(cl.size());
    cplx mean = 0;
    for (int i : cl) mean += right.values[i];
    mean /= static_cast<double>(k);

    Matrix v(n, k);
    for (int c = 0; c < k; ++c) v.col(c) = right.vectors.col(cl[c]).normalized();

    Matrix basis(n, 0);
    if (std::abs(mean.imag()) <= ctol) basis = hermitian_basis(v, d);
    if (basis.cols() != k) {
      if (k == 1) {
        basis = phase_fixed(v.col(0));
      } else {
        basis = complex_gs(v);
      }
    }
    bool ok = basis.cols() == k;
    if (!ok) {
      basis = v;
      for (int c = 0; c < k; ++c) basis.col(c) = phase_fixed(v.col(c));
    }

    // The k left eigenvectors whose conjugate eigenvalues sit closest to the cluster.
    std::vector<int> picks;
    for (int c = 0; c < k; ++c) {
      int best = -1;
      double best_d = 0;
      for (int j = 0; j < n; ++j) {
        if (left_used[j]) continue;
        const double dist = std::abs(std::conj(left.values[j]) - mean);
        if (best < 0 || dist < best_d) {
          best = j;
          best_d = dist;
        }
      }
      left_used[best] = true;
      picks.push_back(best);
    }
    Matrix w(n, k);
    for (int c = 0; c < k; ++c) w.col(c) = left.vectors.col(picks[c]).normalized();

    const Matrix m = w.adjoint() * basis;
    if (ok && min_singular(m) < opts.defect_tol) ok = false;

    Matrix wb;
    if (ok) {
      wb = w * m.inverse().adjoint();
    } else {
      wb = w;
      for (int c = 0; c < k; ++c) {
        const cplx ov = w.col(c).dot(basis.col(c));
        if (std::abs(ov) > 0) wb.col(c) /= std::conj(ov);
      }
    }

    const Matrix rayleigh = wb.adjoint() * l.matrix() * basis;
    for (int c = 0; c < k; ++c) {
      const int slot = cl[c];
      rv[slot] = basis.col(c);
      lv[slot] = wb.col(c);
      defect[slot] = !ok;
      vals[slot] = ok ? rayleigh(c, c) : right.values[cl[c]];
      if (ok && std::abs(mean.imag()) <= ctol && k > 0 && basis.cols() == k) {
        // Hermitian eigenmatrices belong to real eigenvalues.
        if (std::abs(vals[slot].imag()) <= ctol) vals[slot] = {vals[slot].real(), 0.0};
      }
    }
  }

  Spectrum s{l.space(), {}, {}, {}, {}, {}, std::nullopt, scale};

  std::vector<int> zero;
  for (int i = 0; i < n; ++i)
    if (std::abs(vals[i]) <= opts.zero_tol * scale) zero.push_back(i);

  // Trace-carrying combination of the zero subspace, ρ_ss = P0(I/D), then
  // re-orthonormalize that subspace with ρ_ss as its first member.
  std::optional<Vector> ss_vec;
  if (!zero.empty()) {
    const Vector vid = vectorize(Operator::identity(l.space())) / static_cast<double>(d);
    Vector acc = Vector::Zero(n);
    for (int i : zero) acc += lv[i].dot(vid) * rv[i];
    const Vector herm = 0.5 * (acc + vec_dagger(acc, d));
    ss_vec = herm;

    const bool zero_ok = std::none_of(zero.begin(), zero.end(), [&](int i) { return defect[i]; });
    if (zero_ok && herm.norm() > 0) {
      const int k = static_cast<int>(zero.size());
      Matrix v(n, k), w(n, k);
      for (int c = 0; c < k; ++c) {
        v.col(c) = rv[zero[c]];
        w.col(c) = lv[zero[c]];
      }
      const Matrix basis = hermitian_basis(v, d, {herm.normalized()});
      if (basis.cols() == k) {
        const Matrix m = w.adjoint() * basis;
        const Matrix wb = w * m.inverse().adjoint();
        for (int c = 0; c < k; ++c) {
          rv[zero[c]] = basis.col(c);
          lv[zero[c]] = wb.col(c);
          vals[zero[c]] = {0.0, 0.0};
        }
      }
    }
  }

  // Sort.
  const double q = opts.sort_tol * scale;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<long long> kre(n), kim(n);
  std::vector<Matrix> mats(n);
  std::vector<int> zero_rank(n, -1);
  for (std::size_t c = 0; c < zero.size(); ++c) zero_rank[zero[c]] = static_cast<int>(c);
  for (int i = 0; i < n; ++i) {
    kre[i] = std::llround(std::abs(vals[i].real()) / q);
    kim[i] = std::llround(vals[i].imag() / q);
    mats[i] = devectorize(rv[i], l.space()).matrix();
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (kre[a] != kre[b]) return kre[a] < kre[b];
    if (kim[a] != kim[b]) return kim[a] < kim[b];
    if (zero_rank[a] >= 0 && zero_rank[b] >= 0) return zero_rank[a] < zero_rank[b];
    return lex_less(mats[a], mats[b]);
  });

  for (int i : order) {
    s.eigenvalues.push_back(vals[i]);
    s.right.push_back(devectorize(rv[i], l.space()));
    s.left.push_back(devectorize(lv[i], l.space()).adjoint());
    s.defect.push_back(defect[i]);
  }
  for (int pos = 0; pos < n; ++pos)
    if (std::abs(s.eigenvalues[pos]) <= opts.zero_tol * scale) s.zero_indices.push_back(pos);

  if (ss_vec) {
    Operator rho = devectorize(*ss_vec, l.space());
    const cplx tr = rho.trace();
    if (std::abs(tr) > 1e-14) s.steady_state = (1.0 / tr) * rho;
  }
  return s;
}

Spectrum analyze_liouvillian(const SuperOp& l, const SpectralOptions& opts) {
  Spectrum s = diagonalize_superop(l, opts);
  if (s.zero_indices.empty() || !s.steady_state) {
    throw NumericalError("not a Liouvillian (trace check failed upstream?): no zero eigenvalue");
  }
  const Operator rho = s.steady_state->hermitian_part();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw NumericalError("steady state is not positive semidefinite");
  }
  s.steady_state = rho;
  return s;
}

// ------------------------------------ NHH ------------------------------------

Operator NhhSpectrum::induced_eigenmatrix(int l, int m) const { return Operator::outer(space, phi.at(l), phi.at(m)); }

NhhSpectrum analyze_nhh(const Operator& h_eff, double defect_condition) {
  const int d = h_eff.dim();
  const RawEig r = eig(h_eff.matrix());
  const double scale = std::max(1.0, h_eff.max_abs());
  const double q = 1e-9 * scale;

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Vector> vecs(d);
  for (int i = 0; i < d; ++i) vecs[i] = phase_fixed(r.vectors.col(i));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const long long ra = std::llround(r.values[a].real() / q), rb = std::llround(r.values[b].real() / q);
    if (ra != rb) return ra < rb;
    const long long ia = std::llround(r.values[a].imag() / q), ib = std::llround(r.values[b].imag() / q);
    if (ia != ib) return ia < ib;
    for (int j = 0; j < d; ++j) {
      if (vecs[a](j).real() != vecs[b](j).real()) return vecs[a](j).real() < vecs[b](j).real();
      if (vecs[a](j).imag() != vecs[b](j).imag()) return vecs[a](j).imag() < vecs[b](j).imag();
    }
    return false;
  });

  NhhSpectrum out{h_eff.space(), {}, {}, 1.0, false, {}};
  Matrix vmat(d, d);
  for (int c = 0; c < d; ++c) {
    out.h.push_back(r.values[order[c]]);
    out.phi.push_back(vecs[order[c]]);
    vmat.col(c) = vecs[order[c]];
  }
  Eigen::JacobiSVD<Matrix> svd(vmat);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  out.condition_number = smin > 0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  out.near_defective = out.condition_number > defect_condition;
  for (int l = 0; l < d; ++l)
    for (int m = 0; m < d; ++m) out.induced.push_back({-kI * (out.h[l] - std::conj(out.h[m])), l, m});
  return out;
}

// ------------------------------ Decompositions -------------------------------

PmDecomposition pm_decomposition(const Operator& rho, double herm_rel_tol) {
  const auto dec = hermitian_spectral_decomposition(rho, herm_rel_tol);
  double pmax = 0;
  for (double p : dec.eigenvalues) pmax = std::max(pmax, std::abs(p));
  const double cut = 1e-12 * pmax;
  Matrix plus = Matrix::Zero(rho.dim(), rho.dim());
  Matrix minus = Matrix::Zero(rho.dim(), rho.dim());
  double wp = 0, wm = 0;
  for (std::size_t k = 0; k < dec.eigenvalues.size(); ++k) {
    const double p = dec.eigenvalues[k];
    const Matrix proj = dec.eigenvectors[k] * dec.eigenvectors[k].adjoint();
    if (p > cut) {
      plus += p * proj;
      wp += p;
    } else if (p < -cut) {
      minus -= p * proj;
      wm -= p;
    }
  }
  if (wp == 0 || wm == 0) throw DomainError("pm_decomposition: not traceless (eigenvalues all of one sign)");
  return {Operator(rho.space(), plus / wp), Operator(rho.space(), minus / wm), wp, wm};
}

std::pair<Operator, Operator> sym_antisym(const Operator& rho) {
  const Operator rd = rho.adjoint();
  return {rho + rd, kI * (rho - rd)};
}

// -------------------------------- Lemma checks --------------------------------

bool LemmaReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return !c.applicable || c.passed; });
}

const LemmaCheck& LemmaReport::get(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw DomainError("LemmaReport: no check named " + name);
}

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  const std::size_t n = a.size();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  pairs.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pairs.emplace_back(std::abs(a[i] - b[j]), i, j);
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> ua(n, false), ub(n, false);
  double worst = 0;
  std::size_t matched = 0;
  for (const auto& [dist, i, j] : pairs) {
    if (ua[i] || ub[j]) continue;
    ua[i] = ub[j] = true;
    worst = std::max(worst, dist);
    if (++matched == n) break;
  }
  return worst;
}

CommutingPrediction commuting_jump_prediction(const LindbladModel& model, double commute_tol) {
  CommutingPrediction out;
  const Operator heff = effective_hamiltonian(model);
  const auto gammas = model.jump_operators();
  const double scale = std::max(1.0, heff.max_abs());
  for (const auto& g : gammas) {
    if (commutator(g, heff).max_abs() > commute_tol * scale) return out;
  }
  // A generic combination separates degeneracies of H_eff shared with the jumps.
  Operator probe = heff;
  for (std::size_t mu = 0; mu < gammas.size(); ++mu) {
    const double ang = 0.7 * static_cast<double>(mu + 1);
    probe += (0.3711 + 0.1093 * static_cast<double>(mu)) * std::polar(1.0, ang) * gammas[mu];
  }
  const RawEig r = eig(probe.matrix());
  const int d = heff.dim();
  std::vector<Vector> phi(d);
  std::vector<cplx> h(d);
  std::vector<std::vector<cplx>> g(gammas.size(), std::vector<cplx>(d));
  for (int l = 0; l < d; ++l) {
    phi[l] = r.vectors.col(l).normalized();
    h[l] = phi[l].dot(heff * phi[l]);
    for (std::size_t mu = 0; mu < gammas.size(); ++mu) g[mu][l] = phi[l].dot(gammas[mu] * phi[l]);
  }
  out.applicable = true;
  for (int l = 0; l < d; ++l)
    for (int m = 0; m < d; ++m) {
      cplx base = -kI * (h[l] - std::conj(h[m]));
      cplx a = base, b = base;
      for (std::size_t mu = 0; mu < gammas.size(); ++mu) {
        a += g[mu][l] * std::conj(g[mu][m]);
        b += g[mu][m] * std::conj(g[mu][l]);
      }
      out.lambda_gl_gm_conj.push_back(a);
      out.lambda_gm_gl_conj.push_back(b);
      out.eigenmatrices.push_back(Operator::outer(heff.space(), phi[l], phi[m]));
    }
  return out;
}

LemmaReport check_lemmas(const Spectrum& spec, const LindbladModel& model, const LemmaOptions& opts) {
  LemmaReport rep;
  const SuperOp l = assemble_liouvillian(model);
  const double scale = spec.scale;
  const int n = spec.size();
  auto fmt = [](double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
  };

  // Re λ <= 0
  {
    LemmaCheck c{"ReLambda", true, true, 0.0, ""};
    for (const auto& lam : spec.eigenvalues) c.worst = std::max(c.worst, lam.real());
    c.passed = c.worst <= 1e-10 * scale;
    c.detail = "max Re(lambda) = " + fmt(c.worst);
    rep.checks.push_back(c);
  }

  // L1: exp(Lt) ρ_i = e^{λ_i t} ρ_i
  {
    LemmaCheck c{"L1", true, true, 0.0, ""};
    const Matrix et = (l.matrix() * opts.t_evolve).exp();
    for (int i = 0; i < n; ++i) {
      if (spec.defect[i]) continue;
      const Vector v = vectorize(spec.right[i]);
      const Vector r = et * v - std::exp(spec.eigenvalues[i] * opts.t_evolve) * v;
      c.worst = std::max(c.worst, r.norm());
    }
    c.passed = c.worst <= opts.evolve_tol;
    c.detail = "max |exp(Lt)rho_i - e^{lambda_i t} rho_i| at t=" + fmt(opts.t_evolve) + ": " + fmt(c.worst);
    rep.checks.push_back(c);
  }

  // L2: λ ≠ 0 ⇒ Tr ρ_i = 0, and Tr ρ_i ≠ 0 ⇒ λ = 0
  {
    LemmaCheck c{"L2", true, true, 0.0, ""};
    bool zero_carries_trace = false;
    bool converse_ok = true;
    for (int i = 0; i < n; ++i) {
      const bool is_zero = std::find(spec.zero_indices.begin(), spec.zero_indices.end(), i) != spec.zero_indices.end();
      const double tr = std::abs(spec.right[i].trace());
      if (is_zero) {
        if (tr > opts.trace_tol) zero_carries_trace = true;
      } else {
        c.worst = std::max(c.worst, tr);
        if (tr > opts.trace_tol) converse_ok = false;
      }
    }
    c.passed = c.worst <= opts.trace_tol && converse_ok && zero_carries_trace;
    c.detail = "max |Tr rho_i| over lambda_i != 0: " + fmt(c.worst) +
               (zero_carries_trace ? "; trace carried by the zero subspace" : "; zero subspace carries no trace");
    rep.checks.push_back(c);
  }

  // L3: λ ↔ λ*, with ρ_i† an eigenmatrix of λ*
  {
    LemmaCheck c{"L3", true, true, 0.0, ""};
    std::vector<cplx> conj_vals;
    for (const auto& lam : spec.eigenvalues) conj_vals.push_back(std::conj(lam));
    const double pair_dist = multiset_distance(spec.eigenvalues, conj_vals);
    double resid = 0;
    for (int i = 0; i < n; ++i) {
      if (spec.defect[i]) continue;
      const Operator rd = spec.right[i].adjoint();
      const Operator r = l.apply(rd) - std::conj(spec.eigenvalues[i]) * rd;
      resid = std::max(resid, hs_norm(r));
    }
    c.worst = std::max(pair_dist, resid);
    c.passed = pair_dist <= opts.pair_tol * scale && resid <= opts.pair_tol * scale;
    c.detail = "spectrum vs conjugate multiset distance " + fmt(pair_dist) + ", max |L rho_i^dag - lambda_i^* rho_i^dag| " +
               fmt(resid);
    rep.checks.push_back(c);
  }

  // L4: commuting jumps ⇒ eigenmatrices |φ_l><φ_m|
  {
    LemmaCheck c{"L4", false, true, 0.0, ""};
    const auto pred = commuting_jump_prediction(model);
    if (!pred.applicable) {
      c.detail = "not applicable: some jump operator does not commute with H_eff";
    } else {
      c.applicable = true;
      double resid = 0;
      for (std::size_t k = 0; k < pred.eigenmatrices.size(); ++k) {
        const Operator& rho = pred.eigenmatrices[k];
        const Operator r = l.apply(rho) - pred.lambda_gl_gm_conj[k] * rho;
        resid = std::max(resid, hs_norm(r) / hs_norm(rho));
      }
      const double dist_a = multiset_distance(pred.lambda_gl_gm_conj, spec.eigenvalues);
      const double dist_b = multiset_distance(pred.lambda_gm_gl_conj, spec.eigenvalues);
      // Every numerical eigenmatrix must lie in the span of the predicted
      // eigenmatrices sharing its eigenvalue.
      double span_def = 0;
      for (int i = 0; i < n; ++i) {
        std::vector<Vector> group;
        for (std::size_t k = 0; k < pred.eigenmatrices.size(); ++k)
          if (std::abs(pred.lambda_gl_gm_conj[k] - spec.eigenvalues[i]) <= 1e-6 * scale)
            group.push_back(vectorize(pred.eigenmatrices[k]));
        const Vector v = vectorize(spec.right[i]);
        if (group.empty()) {
          span_def = std::max(span_def, 1.0);
          continue;
        }
        Matrix g(v.size(), static_cast<Eigen::Index>(group.size()));
        for (std::size_t k = 0; k < group.size(); ++k) g.col(k) = group[k];
        const Vector coef = g.completeOrthogonalDecomposition().solve(v);
        span_def = std::max(span_def, 1.0 - (g * coef).norm() / v.norm());
      }
      c.worst = std::max({resid, dist_a, span_def});
      c.passed = resid <= opts.nhh_overlap_tol && dist_a <= opts.nhh_overlap_tol * scale && span_def <= opts.nhh_overlap_tol;
      c.detail = "reading g_l g_m*: residual " + fmt(resid) + ", spectrum distance " + fmt(dist_a) +
                 "; reading g_m g_l*: spectrum distance " + fmt(dist_b) + "; eigenmatrix span defect " + fmt(span_def);
    }
    rep.checks.push_back(c);
  }

  // L5: zero eigenvalue has full geometric multiplicity
  {
    LemmaCheck c{"L5", true, true, 0.0, ""};
    const int k = static_cast<int>(spec.zero_indices.size());
    bool flagged = false;
    Matrix z(static_cast<Eigen::Index>(spec.space.dim()) * spec.space.dim(), k);
    for (int c2 = 0; c2 < k; ++c2) {
      z.col(c2) = vectorize(spec.right[spec.zero_indices[c2]]);
      flagged = flagged || spec.defect[spec.zero_indices[c2]];
    }
    double ratio = 0;
    if (k > 0) {
      Eigen::JacobiSVD<Matrix> svd(z);
      ratio = svd.singularValues()(k - 1) / svd.singularValues()(0);
    }
    c.worst = ratio;
    c.passed = k > 0 && !flagged && ratio > opts.rank_tol;
    c.detail = "zero multiplicity " + std::to_string(k) + ", sigma_min/sigma_max of its eigenmatrices " + fmt(ratio);
    rep.checks.push_back(c);
  }

  // T1: no zero-eigenvalue branch in a flagged coalescence
  {
    LemmaCheck c{"T1", true, true, 0.0, ""};
    int bad = 0;
    for (int i = 0; i < n; ++i)
      if (spec.defect[i] && std::abs(spec.eigenvalues[i]) <= 1e-6 * scale) ++bad;
    c.worst = bad;
    c.passed = bad == 0;
    c.detail = std::to_string(bad) + " zero-eigenvalue modes flagged defective";
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace lioueps
