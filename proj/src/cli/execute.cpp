// execute.cpp — command dispatch and file emission for the lioueps CLI.

#include "lioueps/cli/execute.hpp"

#include "lioueps/dynamics.hpp"
#include "lioueps/ep_detect.hpp"
#include "lioueps/models.hpp"
#include "lioueps/parallel.hpp"
#include "lioueps/spectral.hpp"
#include "lioueps/superop.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lioueps::cli {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON text with every floating-point value at 17 significant digits.
void write_json(std::ostream& os, const json& j, int indent = 0) {
  const std::string pad(indent + 2, ' '), end_pad(indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent + 2);
      }
      os << "\n" << end_pad << "}";
      return;
    }
    case json::value_t::array: {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        write_json(os, j[i], indent + 2);
      }
      os << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << num(v);
      } else {
        os << "null";
      }
      return;
    }
    default: os << j.dump();
  }
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Operator& o) {
  json rows = json::array();
  for (int r = 0; r < o.dim(); ++r) {
    json row = json::array();
    for (int c = 0; c < o.dim(); ++c) row.push_back(cplx_json(o.matrix()(r, c)));
    rows.push_back(row);
  }
  return rows;
}

class Output {
 public:
  Output(const RunConfig& cfg, const ExecOptions& opts) : cfg_(cfg), opts_(opts) {
    std::filesystem::path p(cfg.output);
    if (!opts.output_dir.empty()) p = std::filesystem::path(opts.output_dir) / p.filename();
    prefix_ = p;
  }

  std::string path(const std::string& suffix) const { return prefix_.string() + suffix; }

  std::ofstream open(const std::string& suffix) const {
    const std::filesystem::path file(path(suffix));
    std::error_code ec;
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + file.parent_path().string() + ": " + ec.message());
    std::ofstream f(file, std::ios::binary);
    if (!f) throw IoError("cannot open " + file.string() + " for writing");
    return f;
  }

  void close(std::ofstream& f, const std::string& suffix) const {
    f.flush();
    if (!f) throw IoError("write failed for " + path(suffix));
  }

  std::string header() const {
    std::ostringstream h;
    h << "# lioueps " << kVersion << "\n";
    h << "# config: " << cfg_.echo << "\n";
    if (opts_.seed) h << "# override: seed=" << *opts_.seed << "\n";
    h << "# convention: " << SuperOp::kConvention
      << "; jump operators sqrt(rate)*X; qubit basis (g,e) with sigma_z=diag(1,-1); two-mode index n_a*levels+n_b; "
         "spectra sorted by |Re|, then Im\n";
    const auto& t = cfg_.tolerances;
    h << "# tolerances: cluster=" << num(t.cluster) << " zero=" << num(t.zero) << " defect=" << num(t.defect)
      << " rank=" << num(t.rank) << " param=" << num(t.param) << "\n";
    return h.str();
  }

  json meta() const {
    json m;
    m["lioueps_version"] = kVersion;
    m["config"] = json::parse(cfg_.echo);
    m["convention"] = std::string(SuperOp::kConvention) +
                      "; jump operators sqrt(rate)*X; qubit basis (g,e) with sigma_z=diag(1,-1)";
    if (opts_.seed) m["override_seed"] = *opts_.seed;
    return m;
  }

 private:
  const RunConfig& cfg_;
  const ExecOptions& opts_;
  std::filesystem::path prefix_;
};

SpectralOptions spectral_opts(const Tolerances& t) {
  SpectralOptions o;
  o.cluster_tol = t.cluster;
  o.zero_tol = t.zero;
  o.defect_tol = t.defect;
  return o;
}

EpOptions ep_opts(const RunConfig& cfg, int threads) {
  EpOptions o;
  o.scan_points = std::max(cfg.sweep->steps, 3);  // ep-locate always has a sweep
  o.param_tol = cfg.tolerances.param;
  o.rank_tol = cfg.tolerances.rank;
  o.threads = threads;
  return o;
}

std::string sweep_param(const RunConfig& cfg) {
  return cfg.sweep ? cfg.sweep->param : model_family(cfg.model).default_sweep_param;
}

struct Observable {
  std::string name;
  Operator op;
};

std::vector<Observable> observables(const RunConfig& cfg, const LindbladModel& m) {
  std::vector<Observable> out;
  if (cfg.model == "example1" || cfg.model == "example2") {
    const auto q = build_qubit_ops();
    out = {{"sx", q.sx}, {"sy", q.sy}, {"sz", q.sz}};
  } else if (cfg.model == "example3") {
    const int levels = static_cast<int>(cfg.params.at("levels"));
    const auto b = build_boson_ops(levels);
    out = {{"n_a", tensor(b.n, b.id)}, {"n_b", tensor(b.id, b.n)}};
  } else {
    out = {{"n", build_boson_ops(static_cast<int>(cfg.params.at("levels"))).n}};
  }
  (void)m;
  return out;
}

Vector state_vector(const StateSpec& s, const HilbertSpace& space, const char* field) {
  const int d = space.dim();
  Vector v = Vector::Zero(d);
  if (s.kind == "basis" || s.kind == "qubit") {
    if (s.index >= d) throw DomainError(std::string(field) + ": basis index " + std::to_string(s.index) + " >= dimension " + std::to_string(d));
    v(s.index) = 1;
  } else if (s.kind == "amplitudes") {
    if (static_cast<int>(s.amplitudes.size()) != d)
      throw DomainError(std::string(field) + ": expected " + std::to_string(d) + " amplitudes, got " + std::to_string(s.amplitudes.size()));
    for (int k = 0; k < d; ++k) v(k) = s.amplitudes[k];
    v.normalize();
  } else {
    throw DomainError(std::string(field) + ": state '" + s.kind + "' is not a pure state");
  }
  return v;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

void write_overlaps(std::ostream& f, double param, const Eigen::MatrixXd& ov, double overlap_min) {
  const int n = static_cast<int>(ov.rows());
  const double cut = overlap_min >= 0 ? overlap_min : (n <= 32 ? 0.0 : 0.1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (ov(i, j) >= cut) f << num(param) << "," << i << "," << j << "," << num(ov(i, j)) << "\n";
}

// ------------------------------- commands -----------------------------------

int cmd_spectrum(const RunConfig& cfg, const Output& out, std::ostream& os) {
  const auto m = build_model(cfg.model, cfg.params);
  const auto spec = analyze_liouvillian(assemble_liouvillian(m), spectral_opts(cfg.tolerances));
  const std::string pname = sweep_param(cfg);
  const double pval = cfg.params.at(pname);

  auto f = out.open("_eigenvalues.csv");
  f << out.header() << "param,index,re_lambda,im_lambda,branch_id\n";
  for (int i = 0; i < spec.size(); ++i)
    f << num(pval) << "," << i << "," << num(spec.eigenvalues[i].real()) << "," << num(spec.eigenvalues[i].imag())
      << "," << i << "\n";
  out.close(f, "_eigenvalues.csv");

  auto g = out.open("_overlaps.csv");
  g << out.header() << "param,i,j,overlap\n";
  write_overlaps(g, pval, overlap_matrix(spec), cfg.tolerances.overlap_min);
  out.close(g, "_overlaps.csv");

  os << "model " << cfg.model << " (" << pname << " = " << num(pval) << "), " << spec.size() << " eigenvalues\n";
  char buf[160];
  for (int i = 0; i < spec.size(); ++i) {
    std::snprintf(buf, sizeof buf, "  %4d  %+.12e %+.12ei%s\n", i, spec.eigenvalues[i].real(),
                  spec.eigenvalues[i].imag(), spec.defect[i] ? "  [defect]" : "");
    os << buf;
  }
  if (const auto cf = closed_form_liouvillian(cfg.model, cfg.params)) {
    std::snprintf(buf, sizeof buf, "closed-form spectrum deviation: %.3e\n", multiset_distance(spec.eigenvalues, *cf));
    os << buf;
  }
  os << "wrote " << out.path("_eigenvalues.csv") << ", " << out.path("_overlaps.csv") << "\n";
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, const Output& out, int threads, std::ostream& os) {
  const auto& sw_cfg = *cfg.sweep;
  const auto grid = linspace(sw_cfg.from, sw_cfg.to, sw_cfg.steps);
  const Family fam = make_family(cfg.model, cfg.params, sw_cfg.param);
  const auto sw = sweep(fam, grid, operator_kind_from_string(sw_cfg.op), threads);

  auto f = out.open("_eigenvalues.csv");
  f << out.header() << "param,index,re_lambda,im_lambda,branch_id\n";
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::vector<int> inv(sw.n_branches);
    for (int b = 0; b < sw.n_branches; ++b) inv[sw.assignment[p][b]] = b;
    for (int idx = 0; idx < sw.n_branches; ++idx) {
      const int b = inv[idx];
      f << num(grid[p]) << "," << idx << "," << num(sw.values[p][b].real()) << "," << num(sw.values[p][b].imag())
        << "," << b << "\n";
    }
  }
  out.close(f, "_eigenvalues.csv");

  auto g = out.open("_overlaps.csv");
  g << out.header() << "param,i,j,overlap\n";
  for (std::size_t p = 0; p < grid.size(); ++p)
    write_overlaps(g, grid[p], overlap_matrix(sw.vectors[p]), cfg.tolerances.overlap_min);
  out.close(g, "_overlaps.csv");

  auto q = out.open("_matching.csv");
  q << out.header() << "param,branch_id,matching_quality\n";
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int b = 0; b < sw.n_branches; ++b) q << num(grid[p]) << "," << b << "," << num(sw.matching_quality[p][b]) << "\n";
  out.close(q, "_matching.csv");

  os << "swept " << sw_cfg.param << " over " << grid.size() << " points (" << sw_cfg.op << ", " << sw.n_branches
     << " branches), continuation breaks: " << sw.breaks.size() << "\n";
  os << "wrote " << out.path("_eigenvalues.csv") << ", " << out.path("_overlaps.csv") << ", "
     << out.path("_matching.csv");

  if (cfg.model == "example2" && sw_cfg.param == "gamma_minus") {
    const auto c = sigma_z_expectations(cfg.params.at("omega_x"), grid);
    auto s = out.open("_sigmaz.csv");
    s << out.header() << "gamma_minus,nhh_phi1,nhh_phi2,psi2_plus,psi2_minus,psi3_plus,psi3_minus,steady\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      s << num(grid[i]) << "," << num(c.nhh[i][0]) << "," << num(c.nhh[i][1]);
      for (double v : c.liouvillian[i]) s << "," << num(v);
      s << "," << num(c.steady[i]) << "\n";
    }
    out.close(s, "_sigmaz.csv");
    os << ", " << out.path("_sigmaz.csv");
  }
  os << "\n";
  return kOk;
}

int cmd_ep_locate(const RunConfig& cfg, const Output& out, int threads, std::ostream& os) {
  const auto& sw_cfg = *cfg.sweep;
  const Family fam = make_family(cfg.model, cfg.params, sw_cfg.param);
  const OperatorKind kind = operator_kind_from_string(cfg.ep.op);
  const EpOptions eo = ep_opts(cfg, threads);
  const std::pair<double, double> bracket{sw_cfg.from, sw_cfg.to};

  std::optional<EPReport> rep;
  if (cfg.ep.branch_pair) {
    rep = locate_ep(fam, kind, *cfg.ep.branch_pair, bracket, eo);
  } else {
    const auto cands = candidate_branch_pairs(fam, kind, bracket, eo);
    std::string last = "no branch pair changes discriminant sign in the bracket";
    for (const auto& pr : cands) {
      try {
        rep = locate_ep(fam, kind, pr, bracket, eo);
        break;
      } catch (const NumericalError& e) {
        last = e.what();
      }
    }
    if (!rep) throw NumericalError(std::string("no EP bracketed: ") + last);
  }

  json j = out.meta();
  j["param"] = sw_cfg.param;
  j["param_value"] = rep->param_value;
  j["bracket"] = json::array({bracket.first, bracket.second});
  j["operator"] = to_string(kind);
  j["branch_pair"] = json::array({rep->branch_pair.first, rep->branch_pair.second});
  j["lambda_ep"] = cplx_json(rep->lambda_ep);
  j["gap"] = rep->gap;
  j["overlap_at_ep"] = rep->overlap_at_ep;
  j["order_estimate"] = rep->order_estimate;
  j["jordan_coefficient"] = cplx_json(rep->jordan_coefficient);
  j["jordan_residual"] = rep->jordan_residual;
  j["method"] = rep->method;
  j["iterations"] = rep->iterations;
  if (rep->eigenmatrix) {
    j["eigenmatrix"] = matrix_json(*rep->eigenmatrix);
    j["generalized_eigenmatrix"] = matrix_json(*rep->generalized_eigenmatrix);
  } else {
    json v = json::array(), w = json::array();
    for (Eigen::Index k = 0; k < rep->eigenvector.size(); ++k) {
      v.push_back(cplx_json(rep->eigenvector(k)));
      w.push_back(cplx_json(rep->generalized(k)));
    }
    j["eigenvector"] = v;
    j["generalized_eigenvector"] = w;
  }
  auto f = out.open("_ep.json");
  write_json(f, j);
  f << "\n";
  out.close(f, "_ep.json");

  char buf[256];
  std::snprintf(buf, sizeof buf,
                "EP (%s) at %s = %.12f, branches (%d, %d), lambda = %+.10f %+.10fi, overlap 1-%.2e, order %d, A = "
                "%+.6f %+.6fi, residual %.2e\n",
                to_string(kind), sw_cfg.param.c_str(), rep->param_value, rep->branch_pair.first,
                rep->branch_pair.second, rep->lambda_ep.real(), rep->lambda_ep.imag(), 1 - rep->overlap_at_ep,
                rep->order_estimate, rep->jordan_coefficient.real(), rep->jordan_coefficient.imag(),
                rep->jordan_residual);
  os << buf << "wrote " << out.path("_ep.json") << "\n";
  return kOk;
}

Operator initial_density(const StateSpec& s, const LindbladModel& m, const RunConfig& cfg) {
  if (s.kind == "mixed") return (1.0 / m.space().dim()) * Operator::identity(m.space());
  if (s.kind == "steady")
    return *analyze_liouvillian(assemble_liouvillian(m), spectral_opts(cfg.tolerances)).steady_state;
  const Vector v = state_vector(s, m.space(), "dynamics.rho0");
  return Operator::outer(m.space(), v, v);
}

int cmd_dynamics(const RunConfig& cfg, const Output& out, std::ostream& os) {
  const auto& dy = *cfg.dynamics;
  const auto m = build_model(cfg.model, cfg.params);
  const Operator rho0 = initial_density(dy.rho0, m, cfg);
  const auto times = linspace(0, dy.t_max, dy.n_times);
  Propagation p;
  if (dy.method == "modes") {
    p = propagate_modes(analyze_liouvillian(assemble_liouvillian(m), spectral_opts(cfg.tolerances)), rho0, times);
  } else {
    p = propagate_expm(dy.op == "no_jump" ? assemble_liouvillian_no_jumps(m) : assemble_liouvillian(m), rho0, times);
  }
  const auto obs = observables(cfg, m);
  std::vector<std::vector<double>> cols;
  for (const auto& o : obs) cols.push_back(p.expectation(o.op));

  auto f = out.open("_dynamics.csv");
  f << out.header() << "time,trace,purity";
  for (const auto& o : obs) f << "," << o.name;
  for (int k = 0; k < m.space().dim(); ++k) f << ",pop_" << k;
  f << "\n";
  for (std::size_t t = 0; t < times.size(); ++t) {
    const Matrix& r = p.states[t].matrix();
    f << num(times[t]) << "," << num(r.trace().real()) << "," << num((r * r).trace().real());
    for (const auto& c : cols) f << "," << num(c[t]);
    for (int k = 0; k < r.rows(); ++k) f << "," << num(r(k, k).real());
    f << "\n";
  }
  out.close(f, "_dynamics.csv");
  os << "propagated " << times.size() << " times with " << dy.method << " (" << dy.op << ")\nwrote "
     << out.path("_dynamics.csv") << "\n";
  return kOk;
}

int cmd_trajectories(const RunConfig& cfg, const ExecOptions& eo, const Output& out, int threads, std::ostream& os) {
  const auto& tr = *cfg.trajectories;
  const auto m = build_model(cfg.model, cfg.params);
  const Vector psi0 = state_vector(tr.psi0, m.space(), "trajectories.psi0");
  const auto obs = observables(cfg, m);
  TrajectoryOptions to;
  to.n_traj = tr.n_traj;
  to.dt = tr.dt;
  to.t_max = tr.t_max;
  to.seed = eo.seed ? *eo.seed : tr.seed;
  to.threads = threads;
  to.record_every = tr.record_every;
  for (const auto& o : obs) to.observables.push_back(o.op);
  const auto ens = trajectories(m, psi0, to);

  auto f = out.open("_trajectories.csv");
  f << out.header() << "# seed: " << ens.seed << "\n" << "time,survival";
  for (const auto& o : obs) f << "," << o.name << "_mean," << o.name << "_sem," << o.name << "_nojump";
  f << "\n";
  for (std::size_t t = 0; t < ens.times.size(); ++t) {
    f << num(ens.times[t]) << "," << num(ens.survival[t]);
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const double nj = hs_inner(obs[k].op, ens.conditional_no_jump_state[t]).real();
      f << "," << num(ens.observable_mean[t][k]) << "," << num(ens.observable_sem[t][k]) << "," << num(nj);
    }
    f << "\n";
  }
  out.close(f, "_trajectories.csv");

  auto g = out.open("_jumps.csv");
  g << out.header() << "# seed: " << ens.seed << "\n" << "trajectory,time,channel\n";
  std::size_t total = 0;
  for (std::size_t k = 0; k < ens.jump_records.size(); ++k)
    for (const auto& j : ens.jump_records[k]) {
      g << k << "," << num(j.time) << "," << j.channel << "\n";
      ++total;
    }
  out.close(g, "_jumps.csv");
  os << ens.n_traj << " trajectories, " << total << " jumps, seed " << ens.seed << "\nwrote "
     << out.path("_trajectories.csv") << ", " << out.path("_jumps.csv") << "\n";
  return kOk;
}

struct Row {
  std::string name;
  std::string status;  // PASS | FAIL | n/a
  double worst;
  std::string detail;
};

int cmd_verify(const RunConfig& cfg, std::ostream& os) {
  const auto m = build_model(cfg.model, cfg.params);
  const SuperOp l = assemble_liouvillian(m);
  const auto spec = analyze_liouvillian(l, spectral_opts(cfg.tolerances));
  std::vector<Row> rows;
  auto add = [&](std::string name, bool applicable, bool pass, double worst, std::string detail) {
    rows.push_back({std::move(name), applicable ? (pass ? "PASS" : "FAIL") : "n/a", worst, std::move(detail)});
  };

  const auto rep = check_lemmas(spec, m);
  for (const auto& c : rep.checks) add(c.name, c.applicable, c.passed, c.worst, c.detail);

  // Lemma 4, both index orderings side by side.
  {
    const auto pred = commuting_jump_prediction(m);
    if (pred.applicable) {
      const double a = multiset_distance(spec.eigenvalues, pred.lambda_gl_gm_conj);
      const double b = multiset_distance(spec.eigenvalues, pred.lambda_gm_gl_conj);
      char buf[160];
      std::snprintf(buf, sizeof buf, "reading g_l g_m*: %.3e | reading g_m g_l*: %.3e", a, b);
      add("L4-readings", true, a <= 1e-8 * spec.scale, a, buf);
    } else {
      add("L4-readings", false, false, 0, "some jump does not commute with H_eff");
    }
  }

  {
    Matrix acc = assemble_liouvillian_no_jumps(m).matrix();
    for (const auto& g : m.jump_operators()) acc += jump_superop(g).matrix();
    const double dev = (l.matrix() - acc).cwiseAbs().maxCoeff();
    add("L=L'+J", true, dev <= 1e-12 * spec.scale, dev, "max |L - L' - sum J|");
  }
  {
    const double dev = trace_preservation_defect(l);
    add("trace-preservation", true, dev <= 1e-12 * spec.scale, dev, "max |vec(I)^dag L|");
  }

  // Theorem 1 guard: the zero branch can never be located as an EP.
  {
    const std::string p = model_family(cfg.model).default_sweep_param;
    const double v = cfg.params.at(p);
    const Family fam = make_family(cfg.model, cfg.params, p);
    EpOptions eo;
    eo.scan_points = 8;
    bool refused = false;
    std::string detail;
    try {
      locate_ep(fam, OperatorKind::Liouvillian, {0, 1}, {v, v + 0.5 * std::max(1.0, std::abs(v))}, eo);
      detail = "locate_ep accepted the zero branch";
    } catch (const NumericalError& e) {
      refused = std::string(e.what()).find("zero-eigenvalue") != std::string::npos;
      detail = e.what();
    }
    add("T1-guard", true, refused, 0, detail);
  }

  // Theorem 2 on example 3.
  {
    ParamMap p3 = cfg.model == "example3" ? cfg.params : complete_params(model_family("example3"), {});
    const auto m3 = build_model("example3", p3);
    const auto nhh = analyze_nhh(effective_hamiltonian(m3));
    Vector vac = Vector::Zero(m3.space().dim());
    vac(0) = 1;
    double worst = 0;
    for (std::size_t k = 0; k < nhh.h.size(); ++k) {
      const Operator e = Operator::outer(m3.space(), nhh.phi[k], vac);
      worst = std::max(worst, hs_norm(apply_liouvillian(m3, e) + (kI * nhh.h[k]) * e));
    }
    add("T2", true, worst <= 1e-10, worst,
        std::string("L(|phi_l><0,0|) = -i h_l |phi_l><0,0| on example3") + (cfg.model == "example3" ? "" : " (defaults)"));
  }

  // Kraus-step Richardson ratio.
  {
    const bool own = m.jumps().size() == 1;
    const auto mk = own ? m : build_model("example2", {});
    const int d = mk.space().dim();
    Vector top = Vector::Zero(d);
    top(d - 1) = 1;
    const Operator rho0 = Operator::outer(mk.space(), top, top);
    const SuperOp lk = assemble_liouvillian(mk);
    auto defect = [&](double tau) {
      return hs_norm(kraus_step(mk, rho0, tau) - propagate_expm(lk, rho0, std::vector<double>{tau}).states[0]);
    };
    const double ratio = defect(1e-3) / defect(5e-4);
    char buf[120];
    std::snprintf(buf, sizeof buf, "defect(1e-3)/defect(5e-4) = %.4f%s", ratio, own ? "" : " (example2 defaults)");
    add("Kraus-ratio", true, std::abs(ratio - 4) <= 0.4, ratio, buf);
  }

  bool ok = true;
  os << "verify " << cfg.model << "\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "  %-20s %-5s %10.3e  ", r.name.c_str(), r.status.c_str(), r.worst);
    os << buf << r.detail << "\n";
    ok &= r.status != "FAIL";
  }
  os << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? kOk : kVerifyFailed;
}

}  // namespace

int execute(const RunConfig& cfg, const ExecOptions& opts, std::ostream& out, std::ostream& err) {
  const int threads = std::max(1, opts.threads);
  try {
    const Output o(cfg, opts);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg, o, out);
    if (cfg.command == "sweep") return cmd_sweep(cfg, o, threads, out);
    if (cfg.command == "ep-locate") return cmd_ep_locate(cfg, o, threads, out);
    if (cfg.command == "dynamics") return cmd_dynamics(cfg, o, out);
    if (cfg.command == "trajectories") return cmd_trajectories(cfg, opts, o, threads, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    err << "error: unknown command " << cfg.command << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomainError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"lioueps: Liouvillian spectra, exceptional points and open-system dynamics"};
  std::string config_path, output_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  app.add_option("config", config_path, "JSON run configuration")->required();
  app.add_option("--output-dir", output_dir, "directory for output files (overrides the prefix's directory)");
  app.add_option("--threads", threads, "worker threads (default: LIOUEPS_THREADS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "trajectory seed override");
  app.set_version_flag("--version", kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kConfigError;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    err << "io error: cannot read " << config_path << "\n";
    return kIoError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  const auto parsed = parse_config(text.str());
  if (!parsed.config) {
    err << "configuration errors in " << config_path << ":\n";
    for (const auto& e : parsed.errors) err << "  " << e << "\n";
    return kConfigError;
  }
  ExecOptions eo;
  eo.output_dir = output_dir;
  eo.threads = resolve_threads(threads);
  eo.seed = seed;
  return execute(*parsed.config, eo, out, err);
}

}  // namespace lioueps::cli
