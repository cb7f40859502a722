// ep_detect.cpp

#include "lioueps/ep_detect.hpp"

#include "lioueps/errors.hpp"
#include "lioueps/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <tuple>

namespace lioueps {

namespace {

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Vector phase_fixed(Vector v) {
  v.normalize();
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (std::abs(v(j)) >= vmax * (1.0 - 1e-9)) {
      v *= std::conj(v(j)) / std::abs(v(j));
      break;
    }
  return v;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

LindbladModel build_at(const Family& family, double g, int index) {
  try {
    return family(g);
  } catch (const DomainError& e) {
    throw DomainError(fmt("grid point %.0f (param=%.17g): ", index, g) + e.what());
  } catch (const Error& e) {
    throw NumericalError(fmt("grid point %.0f (param=%.17g): ", index, g) + e.what());
  }
}

// Two eigenvalues nearest to ref, by increasing distance.
std::pair<int, int> nearest_two(const std::vector<cplx>& v, cplx ref) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](int a, int b) {
    const double da = std::abs(v[a] - ref), db = std::abs(v[b] - ref);
    return da != db ? da < db : a < b;
  });
  return {idx[0], idx[1]};
}

// Discriminant sign usable only when it is (numerically) real.
int disc_sign(cplx d, double scale) {
  const double mag = std::abs(d);
  if (mag <= 1e-14 * scale * scale) return 0;
  if (std::abs(d.imag()) > 1e-6 * mag) return 0;
  return d.real() > 0 ? 1 : -1;
}

// First consecutive pair of signed points with opposite sign; zeros skipped.
std::optional<std::pair<int, int>> first_sign_change(const std::vector<int>& sign) {
  int last = -1;
  for (int k = 0; k < static_cast<int>(sign.size()); ++k) {
    if (sign[k] == 0) continue;
    if (last >= 0 && sign[k] != sign[last] && k - last <= 2) return std::make_pair(last, k);
    last = k;
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::Liouvillian: return "liouvillian";
    case OperatorKind::NoJump: return "no_jump";
    case OperatorKind::Nhh: return "nhh";
  }
  return "?";
}

OperatorKind operator_kind_from_string(const std::string& s) {
  if (s == "liouvillian") return OperatorKind::Liouvillian;
  if (s == "no_jump") return OperatorKind::NoJump;
  if (s == "nhh") return OperatorKind::Nhh;
  throw DomainError("unknown operator kind '" + s + "' (expected liouvillian, no_jump or nhh)");
}

Matrix operator_matrix(const LindbladModel& m, OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Liouvillian: return assemble_liouvillian(m).matrix();
    case OperatorKind::NoJump: return assemble_liouvillian_no_jumps(m).matrix();
    case OperatorKind::Nhh: return effective_hamiltonian(m).matrix();
  }
  throw DomainError("operator_matrix: bad kind");
}

EigenPoint eigen_point(const Matrix& op, OperatorKind kind, bool want_vectors) {
  Eigen::ComplexEigenSolver<Matrix> es(op, want_vectors);
  if (es.info() != Eigen::Success) throw NumericalError("complex eigensolver did not converge");
  const int n = static_cast<int>(op.rows());
  EigenPoint p;
  p.scale = std::max(1.0, op.cwiseAbs().maxCoeff());
  const double q = 1e-9 * p.scale;

  std::vector<Vector> vecs;
  if (want_vectors)
    for (int i = 0; i < n; ++i) vecs.push_back(phase_fixed(es.eigenvectors().col(i)));

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<long long> k1(n), k2(n);
  for (int i = 0; i < n; ++i) {
    const cplx l = es.eigenvalues()(i);
    k1[i] = std::llround((kind == OperatorKind::Nhh ? l.real() : std::abs(l.real())) / q);
    k2[i] = std::llround(l.imag() / q);
  }
  auto lex = [&](int a, int b) {
    if (!want_vectors) return a < b;
    for (int j = 0; j < n; ++j) {
      const cplx x = vecs[a](j), y = vecs[b](j);
      if (x.real() != y.real()) return x.real() < y.real();
      if (x.imag() != y.imag()) return x.imag() < y.imag();
    }
    return a < b;
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (k1[a] != k1[b]) return k1[a] < k1[b];
    if (k2[a] != k2[b]) return k2[a] < k2[b];
    return lex(a, b);
  });
  for (int i : order) {
    p.values.push_back(es.eigenvalues()(i));
    if (want_vectors) p.vectors.push_back(vecs[i]);
  }
  return p;
}

std::vector<cplx> SweepResult::track(int branch) const {
  if (branch < 0 || branch >= n_branches) throw DomainError("SweepResult::track: branch out of range");
  std::vector<cplx> out;
  out.reserve(values.size());
  for (const auto& row : values) out.push_back(row[branch]);
  return out;
}

SweepResult sweep(const Family& family, std::span<const double> grid, OperatorKind kind, int threads) {
  const int np = static_cast<int>(grid.size());
  if (np < 2) throw DomainError("sweep: grid needs at least 2 points");
  const bool up = grid[1] > grid[0];
  for (int i = 1; i < np; ++i)
    if ((grid[i] > grid[i - 1]) != up || grid[i] == grid[i - 1]) throw DomainError("sweep: grid must be strictly monotone");

  std::vector<EigenPoint> pts(np);
  parallel_for(np, threads, [&](int i) {
    pts[i] = eigen_point(operator_matrix(build_at(family, grid[i], i), kind), kind, true);
  });

  SweepResult r;
  r.kind = kind;
  r.grid.assign(grid.begin(), grid.end());
  const int n = static_cast<int>(pts[0].values.size());
  r.n_branches = n;
  r.values.resize(np);
  r.vectors.resize(np);
  r.assignment.resize(np);
  r.matching_quality.resize(np);
  r.scale.resize(np);

  for (int p = 0; p < np; ++p) {
    if (static_cast<int>(pts[p].values.size()) != n) throw DomainError("sweep: operator dimension changes along the grid");
    r.scale[p] = pts[p].scale;
    std::vector<int>& asg = r.assignment[p];
    std::vector<double>& qual = r.matching_quality[p];
    asg.assign(n, -1);
    qual.assign(n, 1.0);
    if (p == 0) {
      std::iota(asg.begin(), asg.end(), 0);
    } else {
      Matrix prev(pts[p].vectors[0].size(), n), cur(prev.rows(), n);
      for (int b = 0; b < n; ++b) prev.col(b) = r.vectors[p - 1][b];
      for (int j = 0; j < n; ++j) cur.col(j) = pts[p].vectors[j];
      const Eigen::MatrixXd ov = (prev.adjoint() * cur).cwiseAbs();
      std::vector<std::tuple<double, double, int, int>> cand;
      cand.reserve(static_cast<std::size_t>(n) * n);
      for (int b = 0; b < n; ++b)
        for (int j = 0; j < n; ++j)
          cand.emplace_back(-ov(b, j), std::abs(r.values[p - 1][b] - pts[p].values[j]), b, j);
      std::sort(cand.begin(), cand.end());
      std::vector<bool> taken(n, false);
      int left = n;
      for (const auto& [negov, dist, b, j] : cand) {
        (void)dist;
        if (asg[b] >= 0 || taken[j]) continue;
        asg[b] = j;
        taken[j] = true;
        qual[b] = std::min(1.0, -negov);
        if (--left == 0) break;
      }
      if (*std::min_element(qual.begin(), qual.end()) < 0.5) r.breaks.push_back(p);
    }
    r.values[p].resize(n);
    r.vectors[p].resize(n);
    for (int b = 0; b < n; ++b) {
      r.values[p][b] = pts[p].values[asg[b]];
      r.vectors[p][b] = pts[p].vectors[asg[b]];
    }
  }
  return r;
}

Eigen::MatrixXd overlap_matrix(const std::vector<Vector>& vectors) {
  const int n = static_cast<int>(vectors.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = i == j ? 1.0 : std::min(1.0, std::abs(vectors[i].normalized().dot(vectors[j].normalized())));
      out(i, j) = out(j, i) = v;
    }
  return out;
}

Eigen::MatrixXd overlap_matrix(const Spectrum& spec) {
  std::vector<Vector> v;
  for (const auto& r : spec.right) v.push_back(vectorize(r));
  return overlap_matrix(v);
}

JordanChain jordan_chain(const Matrix& m, cplx lambda, const Vector& head_guess, double rank_tol) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n || head_guess.size() != n) throw DomainError("jordan_chain: shape mismatch");
  const Matrix s = m - lambda * Matrix::Identity(n, n);
  const double sig_max = Eigen::BDCSVD<Matrix>(m).singularValues()(0);
  const double tol = rank_tol * std::max(sig_max, 1e-300);

  Eigen::BDCSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int zeros = 0;
  for (int k = 0; k < n; ++k)
    if (sv(k) <= tol) ++zeros;
  if (zeros != 1) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "EP order mismatch: dim ker(M - lambda) = %d, expected 1", zeros);
    throw NumericalError(buf);
  }

  JordanChain jc;
  Vector v0 = svd.matrixV().col(n - 1);
  const cplx c = v0.dot(head_guess);
  if (std::abs(c) > 0) v0 *= c / std::abs(c);
  jc.head = v0;

  Vector x = Vector::Zero(n);
  for (int k = 0; k < n - 1; ++k) x += svd.matrixV().col(k) * (svd.matrixU().col(k).dot(v0) / sv(k));
  x -= v0 * v0.dot(x);
  const double xn = x.norm();
  if (!(xn > 0)) throw NumericalError("jordan_chain: no generalized eigenvector (ρ1 not in range)");
  jc.coefficient = 1.0 / xn;
  jc.generalized = x / xn;
  jc.residual = (s * jc.generalized - jc.coefficient * v0).norm();

  // dim ker (M − λ)^k until it saturates.
  Matrix pw = s;
  double tk = tol;
  for (int k = 1; k <= std::min(n, 6); ++k) {
    if (k > 1) {
      pw = pw * s;
      tk *= sig_max;
    }
    const auto svk = Eigen::BDCSVD<Matrix>(pw).singularValues();
    int dk = 0;
    for (int j = 0; j < n; ++j)
      if (svk(j) <= tk) ++dk;
    if (!jc.kernel_dims.empty() && dk == jc.kernel_dims.back()) break;
    jc.kernel_dims.push_back(dk);
  }
  jc.order_estimate = jc.kernel_dims.back();
  return jc;
}

OperatorJordanChain jordan_chain(const SuperOp& l, cplx lambda, const Operator& rho1, double rank_tol) {
  const JordanChain jc = jordan_chain(l.matrix(), lambda, vectorize(rho1), rank_tol);
  return {devectorize(jc.head, l.space()), devectorize(jc.generalized, l.space()), jc.coefficient, jc.residual,
          jc.order_estimate};
}

cplx cluster_discriminant(std::span<const cplx> values) {
  if (values.empty()) return 0;
  cplx mean = 0;
  for (cplx v : values) mean += v;
  mean /= static_cast<double>(values.size());
  cplx acc = 0;
  for (cplx v : values) acc += (v - mean) * (v - mean);
  return acc;
}

double bisect_sign_change(const std::function<double(double)>& f, double lo, double hi, double tol, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo * fhi < 0)) throw NumericalError("no EP bracketed: objective does not change sign");
  for (int it = 0; it < max_iter && std::abs(hi - lo) > tol * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

struct PairTrack {
  std::vector<cplx> disc;
  std::vector<int> sign;
};

PairTrack pair_track(const SweepResult& sw, int a, int b) {
  PairTrack t;
  for (std::size_t p = 0; p < sw.grid.size(); ++p) {
    const cplx d = sw.values[p][a] - sw.values[p][b];
    t.disc.push_back(d * d);
    t.sign.push_back(disc_sign(d * d, sw.scale[p]));
  }
  return t;
}

std::vector<double> scan_grid(std::pair<double, double> bracket, int points) {
  if (!(std::isfinite(bracket.first) && std::isfinite(bracket.second)) || !(bracket.second > bracket.first))
    throw DomainError("locate_ep: bracket must satisfy lo < hi");
  return linspace(bracket.first, bracket.second, std::max(points, 3));
}

}  // namespace

std::vector<std::pair<int, int>> candidate_branch_pairs(const Family& family, OperatorKind kind,
                                                        std::pair<double, double> bracket, const EpOptions& opts) {
  const auto grid = scan_grid(bracket, opts.scan_points);
  const SweepResult sw = sweep(family, grid, kind, opts.threads);
  const double zero = 1e-9 * sw.scale[0];
  std::vector<std::tuple<double, int, int>> found;
  for (int a = 0; a < sw.n_branches; ++a) {
    if (kind != OperatorKind::Nhh && std::abs(sw.values[0][a]) <= zero) continue;
    for (int b = a + 1; b < sw.n_branches; ++b) {
      if (kind != OperatorKind::Nhh && std::abs(sw.values[0][b]) <= zero) continue;
      const auto t = pair_track(sw, a, b);
      const auto sc = first_sign_change(t.sign);
      if (!sc) continue;
      const cplx mean = 0.5 * (sw.values[sc->first][a] + sw.values[sc->first][b]);
      const double decay = kind == OperatorKind::Nhh ? -mean.imag() : -mean.real();
      found.emplace_back(std::round(decay * 1e9) / 1e9, a, b);
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<std::pair<int, int>> out;
  for (const auto& [d, a, b] : found) {
    (void)d;
    out.emplace_back(a, b);
  }
  return out;
}

EPReport locate_ep(const Family& family, OperatorKind kind, std::pair<int, int> branch_pair,
                   std::pair<double, double> bracket, const EpOptions& opts) {
  const auto grid = scan_grid(bracket, opts.scan_points);
  const SweepResult sw = sweep(family, grid, kind, opts.threads);
  auto [a, b] = branch_pair;
  if (a < 0 || b < 0 || a >= sw.n_branches || b >= sw.n_branches || a == b)
    throw DomainError("locate_ep: branch_pair out of range");

  if (kind != OperatorKind::Nhh) {
    const double zero = 1e-9 * sw.scale[0];
    for (int br : {a, b})
      if (std::abs(sw.values[0][br]) <= zero)
        throw NumericalError(fmt("no EP bracketed: branch %.0f is the zero-eigenvalue branch, which is never defective",
                                 br));
  }

  auto eval = [&](double g) { return eigen_point(operator_matrix(family(g), kind), kind, false); };

  EPReport rep;
  rep.kind = kind;
  rep.branch_pair = branch_pair;

  const auto t = pair_track(sw, a, b);
  const auto sc = first_sign_change(t.sign);
  double g_star;
  cplx ref;
  if (sc) {
    double lo = grid[sc->first], hi = grid[sc->second];
    ref = 0.5 * (sw.values[sc->first][a] + sw.values[sc->first][b]);
    const int s_lo = t.sign[sc->first];
    int iters = 0;
    while (std::abs(hi - lo) > opts.param_tol * std::max(1.0, std::abs(lo)) && iters < 200) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      ++iters;
      const EigenPoint ep = eval(mid);
      const auto [i, j] = nearest_two(ep.values, ref);
      const cplx d = ep.values[i] - ep.values[j];
      ref = 0.5 * (ep.values[i] + ep.values[j]);
      const cplx dd = d * d;
      const int s = dd.real() > 0 ? 1 : (dd.real() < 0 ? -1 : 0);
      if (s == 0) {
        lo = hi = mid;
        break;
      }
      (s == s_lo ? lo : hi) = mid;
    }
    g_star = 0.5 * (lo + hi);
    rep.method = "bisection";
    rep.iterations = iters;
  } else {
    // No usable sign change: golden-section on |gap²| around the overlap peak.
    int peak = -1;
    double best = -1;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double ov = std::abs(sw.vectors[p][a].dot(sw.vectors[p][b]));
      if (ov > best) {
        best = ov;
        peak = static_cast<int>(p);
      }
    }
    if (best < opts.overlap_peak)
      throw NumericalError(fmt("no EP bracketed: no discriminant sign change and max overlap %.6g < %.3g", best,
                               opts.overlap_peak));
    double lo = grid[std::max(0, peak - 1)], hi = grid[std::min<int>(grid.size() - 1, peak + 1)];
    ref = 0.5 * (sw.values[peak][a] + sw.values[peak][b]);
    auto obj = [&](double g) {
      const EigenPoint ep = eval(g);
      const auto [i, j] = nearest_two(ep.values, ref);
      const cplx d = ep.values[i] - ep.values[j];
      return std::abs(d * d);
    };
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = obj(x1), f2 = obj(x2);
    int iters = 0;
    while (std::abs(hi - lo) > opts.param_tol * std::max(1.0, std::abs(lo)) && iters < 300) {
      ++iters;
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - r * (hi - lo);
        f1 = obj(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + r * (hi - lo);
        f2 = obj(x2);
      }
      if (x1 >= x2) break;
    }
    g_star = 0.5 * (lo + hi);
    rep.method = "golden";
    rep.iterations = iters;
  }

  const Matrix op = operator_matrix(family(g_star), kind);
  const EigenPoint fin = eigen_point(op, kind, true);
  const auto [i, j] = nearest_two(fin.values, ref);
  rep.param_value = g_star;
  rep.lambda_ep = 0.5 * (fin.values[i] + fin.values[j]);
  rep.gap = std::abs(fin.values[i] - fin.values[j]);
  rep.overlap_at_ep = std::min(1.0, std::abs(fin.vectors[i].dot(fin.vectors[j])));

  if (kind != OperatorKind::Nhh && std::abs(rep.lambda_ep) <= 1e-9 * fin.scale)
    throw NumericalError("no EP bracketed: the pair collapses onto the zero-eigenvalue branch");
  if (rep.method == "golden" && rep.gap > opts.gap_tol * fin.scale)
    throw NumericalError(fmt("no EP bracketed: minimal gap %.3g at param %.12g is not a coalescence", rep.gap, g_star));
  if (rep.overlap_at_ep < 1.0 - 1e-6)
    throw NumericalError(fmt("no EP bracketed: eigenvalues meet at param %.12g but eigenvectors do not coalesce "
                             "(overlap %.9g)",
                             g_star, rep.overlap_at_ep));

  const JordanChain jc = jordan_chain(op, rep.lambda_ep, fin.vectors[i], opts.rank_tol);
  rep.order_estimate = jc.order_estimate;
  rep.jordan_coefficient = jc.coefficient;
  rep.jordan_residual = jc.residual;
  rep.eigenvector = jc.head;
  rep.generalized = jc.generalized;
  if (kind != OperatorKind::Nhh) {
    const HilbertSpace space = family(g_star).space();
    rep.eigenmatrix = devectorize(jc.head, space);
    rep.generalized_eigenmatrix = devectorize(jc.generalized, space);
  }
  return rep;
}

}  // namespace lioueps
