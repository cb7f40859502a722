// models.cpp

#include "lioueps/models.hpp"

#include "lioueps/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace lioueps {

namespace {

void require_rate(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
  if (v < 0) throw DomainError(std::string(name) + " must be >= 0 (got negative rate)");
}

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

void require_levels(int levels) {
  if (levels < 2) throw DomainError("levels must be >= 2");
}

Operator normalized(Matrix m, const HilbertSpace& s) {
  const double n = m.norm();
  if (n > 0) m /= n;
  return Operator(s, std::move(m));
}

double sz_expectation(const Vector& v) {
  const double p0 = std::norm(v(0)), p1 = std::norm(v(1));
  return (p0 - p1) / (p0 + p1);
}

Vector vec2(cplx a, cplx b) {
  Vector v(2);
  v << a, b;
  return v.normalized();
}

}  // namespace

// ------------------------------- builders -----------------------------------

LindbladModel example1(double omega, double gamma_minus, double gamma_x, double gamma_y) {
  require_finite(omega, "omega");
  require_rate(gamma_minus, "gamma_minus");
  require_rate(gamma_x, "gamma_x");
  require_rate(gamma_y, "gamma_y");
  const auto q = build_qubit_ops();
  return LindbladModel((omega / 2.0) * q.sz, {{gamma_minus, q.sm}, {gamma_x, q.sx}, {gamma_y, q.sy}});
}

LindbladModel example2(double omega_x, double gamma_minus) {
  require_finite(omega_x, "omega_x");
  if (!(omega_x > 0)) throw DomainError("omega_x must be > 0");
  require_rate(gamma_minus, "gamma_minus");
  const auto q = build_qubit_ops();
  return LindbladModel((omega_x / 2.0) * q.sx, {{gamma_minus, q.sm}});
}

LindbladModel example3(double omega, double g, double gamma_a, double gamma_b, int levels) {
  require_finite(omega, "omega");
  require_finite(g, "g");
  require_rate(gamma_a, "gamma_a");
  require_rate(gamma_b, "gamma_b");
  require_levels(levels);
  const auto bo = build_boson_ops(levels);
  const Operator a = tensor(bo.a, bo.id);
  const Operator b = tensor(bo.id, bo.a);
  const Operator h = omega * (a.adjoint() * a + b.adjoint() * b) + g * (a.adjoint() * b + b.adjoint() * a);
  return LindbladModel(h, {{gamma_a, a}, {gamma_b, b}});
}

LindbladModel dephasing(double omega, double gamma, int levels) {
  require_finite(omega, "omega");
  require_rate(gamma, "gamma");
  require_levels(levels);
  const auto bo = build_boson_ops(levels);
  return LindbladModel(omega * bo.n, {{gamma, bo.n}});
}

// ----------------------------- closed forms ---------------------------------

Example1ClosedForm example1_closed_form(double omega, double gamma_minus, double gamma_x, double gamma_y) {
  example1(omega, gamma_minus, gamma_x, gamma_y);  // validation
  const auto s = HilbertSpace::qubit();
  Example1ClosedForm cf;
  cf.big_omega = std::sqrt(cplx(gamma_x * gamma_x + gamma_y * gamma_y - 2 * gamma_x * gamma_y - omega * omega, 0.0));
  const double base = -gamma_minus / 2 - gamma_x - gamma_y;
  cf.lambda = {cplx(0), base + cf.big_omega, base - cf.big_omega, cplx(-gamma_minus - 2 * (gamma_x + gamma_y))};

  const double sum = gamma_x + gamma_y;
  if (2 * sum + gamma_minus > 0) {
    Matrix ss = Matrix::Zero(2, 2);
    ss(0, 0) = sum + gamma_minus;  // |g> gains from σ− decay
    ss(1, 1) = sum;
    cf.rho[0] = normalized(ss, s);
  }
  for (int k = 0; k < 2; ++k) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = -kI * omega + (k == 0 ? 1.0 : -1.0) * cf.big_omega;
    m(1, 0) = gamma_x - gamma_y;
    if (m.norm() > 1e-12) cf.rho[k + 1] = normalized(m, s);
  }
  Matrix m3 = Matrix::Zero(2, 2);
  m3(0, 0) = -1;
  m3(1, 1) = 1;
  cf.rho[3] = normalized(m3, s);
  return cf;
}

Example2ClosedForm example2_closed_form(double omega_x, double gamma_minus) {
  example2(omega_x, gamma_minus);
  const auto s = HilbertSpace::qubit();
  const double w = omega_x, g = gamma_minus;
  const cplx zeta = std::sqrt(cplx(4 * w * w - g * g, 0.0));
  const cplx eta = std::sqrt(cplx(g * g - 16 * w * w, 0.0));

  Matrix ss(2, 2);
  ss << g * g + w * w, kI * g * w, -kI * g * w, w * w;
  ss /= (g * g + 2 * w * w);
  Matrix r1(2, 2);
  r1 << 0, 1, 1, 0;
  auto r23 = [&](double sgn) {
    Matrix m(2, 2);
    m << -g + sgn * eta, 4.0 * kI * w, -4.0 * kI * w, g - sgn * eta;
    return normalized(m, s);
  };
  const cplx r2 = std::sqrt(cplx(2 * g, 0) * (g - eta));
  const cplx r3 = std::sqrt(cplx(2 * g, 0) * (g + eta));

  return Example2ClosedForm{
      zeta,
      eta,
      {(-kI * g - zeta) / 4.0, (-kI * g + zeta) / 4.0},
      {vec2(kI * g - zeta, 2 * w), vec2(kI * g + zeta, 2 * w)},
      {cplx(0), cplx(-g / 2), -0.75 * g + eta / 4.0, -0.75 * g - eta / 4.0},
      {Operator(s, ss), normalized(r1, s), r23(1.0), r23(-1.0)},
      {vec2(kI * (-g + eta + r2), 4 * w), vec2(kI * (-g + eta - r2), 4 * w)},
      {vec2(-kI * (g + eta + r3), 4 * w), vec2(-kI * (g + eta - r3), 4 * w)},
      g * g / (g * g + 2 * w * w),
  };
}

Example3OneExcitation example3_one_excitation_closed_form(double omega, double g, double gamma_a, double gamma_b,
                                                           int levels) {
  const auto m = example3(omega, g, gamma_a, gamma_b, levels);
  const int d = m.space().dim();
  const double gbar = (gamma_a + gamma_b) / 2, gam = (gamma_a - gamma_b) / 2;
  Example3OneExcitation cf;
  cf.theta = std::sqrt(cplx(g * g - gam * gam / 4, 0.0));
  cf.g_ep = std::abs(gam) / 2;
  const cplx base = omega - kI * gbar / 2.0;
  cf.h = {base + cf.theta, base - cf.theta};
  const int i10 = levels, i01 = 1;
  for (int k = 0; k < 2; ++k) {
    Vector v = Vector::Zero(d);
    v(i01) = kI * gam / 2.0 + (k == 0 ? 1.0 : -1.0) * cf.theta;
    v(i10) = g;
    const double n = v.norm();
    if (n > 0) v /= n;
    cf.phi[k] = v;
  }
  return cf;
}

Matrix example3_mean_field_closed_form(double omega, double g, double gamma_a, double gamma_b) {
  Matrix k(2, 2);
  k << omega - kI * gamma_a / 2.0, g, g, omega - kI * gamma_b / 2.0;
  return k;
}

Matrix example3_mean_field_matrix(const LindbladModel& m, int levels) {
  if (m.space().dim() != levels * levels) throw DomainError("example3_mean_field_matrix: space is not two modes of `levels`");
  const auto bo = build_boson_ops(levels);
  const Operator a = tensor(bo.a, bo.id);
  const Operator b = tensor(bo.id, bo.a);
  const int vac = 0, i10 = levels, i01 = 1;
  Matrix k(2, 2);
  const Operator la = apply_adjoint_liouvillian(m, Operator(m.space(), a.matrix()));
  const Operator lb = apply_adjoint_liouvillian(m, Operator(m.space(), b.matrix()));
  // ∂t<x> = <L†x>; the vacuum-row elements pick out the coefficients of a and b.
  k(0, 0) = la.matrix()(vac, i10);
  k(0, 1) = la.matrix()(vac, i01);
  k(1, 0) = lb.matrix()(vac, i10);
  k(1, 1) = lb.matrix()(vac, i01);
  return kI * k;
}

std::vector<ExcitationBlock> excitation_blocks(const Operator& h_eff, int levels) {
  if (h_eff.dim() != levels * levels) throw DomainError("excitation_blocks: space is not two modes of `levels`");
  std::vector<ExcitationBlock> out;
  for (int n = 0; n < levels; ++n) {
    ExcitationBlock blk{n, {}, {}};
    for (int na = 0; na <= n; ++na) blk.indices.push_back(na * levels + (n - na));
    const int sz = static_cast<int>(blk.indices.size());
    blk.h_eff.resize(sz, sz);
    for (int i = 0; i < sz; ++i)
      for (int j = 0; j < sz; ++j) blk.h_eff(i, j) = h_eff.matrix()(blk.indices[i], blk.indices[j]);
    out.push_back(std::move(blk));
  }
  return out;
}

double excitation_leakage(const Operator& h_eff, int levels) {
  double worst = 0;
  const int d = h_eff.dim();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const int ni = i / levels + i % levels, nj = j / levels + j % levels;
      if (ni != nj) worst = std::max(worst, std::abs(h_eff.matrix()(i, j)));
    }
  return worst;
}

std::vector<BlockEp> example3_block_eps(double omega, double gamma_a, double gamma_b, int levels,
                                        std::pair<double, double> bracket) {
  auto variance = [&](double g, int n) {
    const auto blocks = excitation_blocks(effective_hamiltonian(example3(omega, g, gamma_a, gamma_b, levels)), levels);
    const Matrix& b = blocks[n].h_eff;
    const cplx tr = b.trace();
    return (b * b).trace() - tr * tr / static_cast<double>(b.rows());
  };
  std::vector<BlockEp> out;
  for (int n = 1; n < levels; ++n) {
    const double g = bisect_sign_change([&](double x) { return variance(x, n).real(); }, bracket.first, bracket.second);
    const auto blocks = excitation_blocks(effective_hamiltonian(example3(omega, g, gamma_a, gamma_b, levels)), levels);
    Eigen::ComplexEigenSolver<Matrix> es(blocks[n].h_eff);
    const Matrix v = es.eigenvectors().colwise().normalized();
    double best = 0;
    for (int i = 0; i < v.cols(); ++i)
      for (int j = i + 1; j < v.cols(); ++j) best = std::max(best, std::abs(v.col(i).dot(v.col(j))));
    out.push_back({n, static_cast<int>(v.cols()), g, std::min(1.0, best)});
  }
  return out;
}

std::vector<cplx> dephasing_closed_form(double omega, double gamma, int levels) {
  dephasing(omega, gamma, levels);
  std::vector<cplx> out;
  for (int m = 0; m < levels; ++m)
    for (int n = 0; n < levels; ++n) {
      const double k = m - n;
      out.emplace_back(-gamma / 2 * k * k, -omega * k);
    }
  return out;
}

// --------------------------- <sigma_z> curves -------------------------------

SigmaZCurves sigma_z_expectations(double omega_x, const std::vector<double>& grid) {
  SigmaZCurves c;
  c.gamma_minus = grid;
  for (double g : grid) {
    const auto cf = example2_closed_form(omega_x, g);
    c.nhh.push_back({sz_expectation(cf.phi[0]), sz_expectation(cf.phi[1])});
    c.liouvillian.push_back({sz_expectation(cf.psi2[0]), sz_expectation(cf.psi2[1]), sz_expectation(cf.psi3[0]),
                             sz_expectation(cf.psi3[1])});
    c.steady.push_back(cf.sigma_z_ss);
  }
  return c;
}

int distinct_count(std::span<const double> values, double tol) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  int n = v.empty() ? 0 : 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > tol) ++n;
  return n;
}

// ------------------------------ registry ------------------------------------

const std::vector<ModelFamily>& model_families() {
  using D = ParamSpec::Domain;
  static const std::vector<ModelFamily> fams = {
      {"example1",
       {{"omega", 1.0, D::Real}, {"gamma_minus", 0.0, D::NonNegative}, {"gamma_x", 1.0, D::NonNegative},
        {"gamma_y", 2.0, D::NonNegative}},
       "gamma_x"},
      {"example2", {{"omega_x", 1.0, D::Positive}, {"gamma_minus", 1.0, D::NonNegative}}, "gamma_minus"},
      {"example3",
       {{"omega", 1.0, D::Real}, {"g", 0.1, D::Real}, {"gamma_a", 1.0, D::NonNegative},
        {"gamma_b", 0.5, D::NonNegative}, {"levels", 4.0, D::Levels}},
       "g"},
      {"dephasing", {{"omega", 1.0, D::Real}, {"gamma", 1.0, D::NonNegative}, {"levels", 4.0, D::Levels}}, "gamma"},
  };
  return fams;
}

const ModelFamily& model_family(const std::string& name) {
  std::string avail;
  for (const auto& f : model_families()) {
    if (f.name == name) return f;
    avail += (avail.empty() ? "" : ", ") + f.name;
  }
  throw DomainError("unknown model '" + name + "' (available: " + avail + ")");
}

std::vector<std::string> param_errors(const ModelFamily& fam, const ParamMap& params) {
  using D = ParamSpec::Domain;
  std::vector<std::string> errs;
  for (const auto& p : fam.params) {
    const auto it = params.find(p.name);
    if (it == params.end()) continue;
    const double v = it->second;
    const std::string field = "model." + p.name;
    if (!std::isfinite(v)) {
      errs.push_back(field + ": must be finite");
      continue;
    }
    switch (p.domain) {
      case D::Real: break;
      case D::NonNegative:
        if (v < 0) errs.push_back(field + ": rate must be >= 0");
        break;
      case D::Positive:
        if (!(v > 0)) errs.push_back(field + ": must be > 0");
        break;
      case D::Levels:
        if (v != std::floor(v) || v < 2 || v > 64) errs.push_back(field + ": must be an integer in [2, 64]");
        break;
    }
  }
  for (const auto& [k, v] : params) {
    (void)v;
    if (std::none_of(fam.params.begin(), fam.params.end(), [&](const ParamSpec& p) { return p.name == k; }))
      errs.push_back("model." + k + ": unknown parameter for " + fam.name);
  }
  return errs;
}

ParamMap complete_params(const ModelFamily& fam, const ParamMap& given) {
  const auto errs = param_errors(fam, given);
  if (!errs.empty()) throw DomainError(errs.front());
  ParamMap out;
  for (const auto& p : fam.params) {
    const auto it = given.find(p.name);
    out[p.name] = it == given.end() ? p.default_value : it->second;
  }
  return out;
}

LindbladModel build_model(const std::string& name, const ParamMap& params) {
  const auto& fam = model_family(name);
  const ParamMap p = complete_params(fam, params);
  if (name == "example1") return example1(p.at("omega"), p.at("gamma_minus"), p.at("gamma_x"), p.at("gamma_y"));
  if (name == "example2") return example2(p.at("omega_x"), p.at("gamma_minus"));
  if (name == "example3")
    return example3(p.at("omega"), p.at("g"), p.at("gamma_a"), p.at("gamma_b"), static_cast<int>(p.at("levels")));
  return dephasing(p.at("omega"), p.at("gamma"), static_cast<int>(p.at("levels")));
}

Family make_family(const std::string& name, const ParamMap& fixed, const std::string& sweep_param) {
  const auto& fam = model_family(name);
  if (std::none_of(fam.params.begin(), fam.params.end(), [&](const ParamSpec& p) { return p.name == sweep_param; }))
    throw DomainError("unknown sweep parameter '" + sweep_param + "' for " + name);
  if (sweep_param == "levels") throw DomainError("levels cannot be swept");
  const ParamMap base = complete_params(fam, fixed);
  return [name, base, sweep_param](double x) {
    ParamMap p = base;
    p[sweep_param] = x;
    return build_model(name, p);
  };
}

std::optional<std::vector<cplx>> closed_form_liouvillian(const std::string& name, const ParamMap& params) {
  const auto& fam = model_family(name);
  const ParamMap p = complete_params(fam, params);
  if (name == "example1") {
    const auto cf = example1_closed_form(p.at("omega"), p.at("gamma_minus"), p.at("gamma_x"), p.at("gamma_y"));
    return std::vector<cplx>(cf.lambda.begin(), cf.lambda.end());
  }
  if (name == "example2") {
    const auto cf = example2_closed_form(p.at("omega_x"), p.at("gamma_minus"));
    return std::vector<cplx>(cf.lambda.begin(), cf.lambda.end());
  }
  if (name == "dephasing") return dephasing_closed_form(p.at("omega"), p.at("gamma"), static_cast<int>(p.at("levels")));
  return std::nullopt;
}

}  // namespace lioueps
