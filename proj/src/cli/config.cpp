// config.cpp — strict parsing: every field is type- and range-checked and
// all problems are reported together.

#include "lioueps/cli/config.hpp"

#include "lioueps/ep_detect.hpp"
#include "lioueps/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <set>

namespace lioueps::cli {

using nlohmann::json;

namespace {

class Checker {
 public:
  std::vector<std::string> errors;

  void err(const std::string& field, const std::string& msg) { errors.push_back(field + ": " + msg); }

  void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok |= it.key() == a;
      if (!ok) {
        std::string list;
        for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        err(where.empty() ? it.key() : where + "." + it.key(), "unknown key (allowed: " + list + ")");
      }
    }
  }

  std::optional<double> number(const json& obj, const char* key, const std::string& field) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number()) {
      err(field, "must be a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      err(field, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> integer(const json& obj, const char* key, const std::string& field, long long lo,
                                   long long hi) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_number_integer() && !(v.is_number_float() && v.get<double>() == std::floor(v.get<double>()))) {
      err(field, "must be an integer");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (d < static_cast<double>(lo) || d > static_cast<double>(hi)) {
      err(field, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return static_cast<long long>(d);
  }

  std::optional<std::string> string(const json& obj, const char* key, const std::string& field) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj.at(key).is_string()) {
      err(field, "must be a string");
      return std::nullopt;
    }
    return obj.at(key).get<std::string>();
  }

  const json* object(const json& obj, const char* key) {
    if (!obj.contains(key)) return nullptr;
    if (!obj.at(key).is_object()) {
      err(key, "must be an object");
      return nullptr;
    }
    return &obj.at(key);
  }

  void positive(std::optional<double> v, const std::string& field) {
    if (v && !(*v > 0)) err(field, "must be > 0");
  }

  std::optional<StateSpec> state(const json& obj, const char* key, const std::string& field, bool allow_mixed) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    StateSpec s;
    if (v.is_string()) {
      const std::string t = v.get<std::string>();
      if (t == "g" || t == "e") {
        s.kind = "basis";
        s.index = t == "g" ? 0 : 1;
        s.amplitudes = {cplx(t == "g" ? 1 : 0), cplx(t == "e" ? 1 : 0)};
        s.kind = "qubit";
      } else if (t.rfind("basis:", 0) == 0) {
        try {
          std::size_t used = 0;
          const int k = std::stoi(t.substr(6), &used);
          if (used != t.size() - 6 || k < 0) throw std::invalid_argument("index");
          s.kind = "basis";
          s.index = k;
        } catch (const std::exception&) {
          err(field, "malformed basis state '" + t + "' (expected basis:<non-negative integer>)");
          return std::nullopt;
        }
      } else if (allow_mixed && (t == "mixed" || t == "steady")) {
        s.kind = t;
      } else {
        err(field, "unknown state '" + t + "' (expected g, e, basis:K" +
                       std::string(allow_mixed ? ", mixed, steady" : "") + " or an amplitude list)");
        return std::nullopt;
      }
      return s;
    }
    if (v.is_array() && !v.empty()) {
      s.kind = "amplitudes";
      double norm = 0;
      for (const auto& a : v) {
        if (a.is_number()) {
          s.amplitudes.emplace_back(a.get<double>(), 0.0);
        } else if (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()) {
          s.amplitudes.emplace_back(a[0].get<double>(), a[1].get<double>());
        } else {
          err(field, "amplitudes must be numbers or [re, im] pairs");
          return std::nullopt;
        }
        norm += std::norm(s.amplitudes.back());
      }
      if (!(norm > 0) || !std::isfinite(norm)) {
        err(field, "amplitude list must have finite nonzero norm");
        return std::nullopt;
      }
      return s;
    }
    err(field, "must be a state name or a non-empty amplitude list");
    return std::nullopt;
  }
};

// Rejects duplicate keys, which nlohmann would otherwise silently collapse.
json parse_strict(const std::string& text, std::vector<std::string>& errors) {
  std::vector<std::set<std::string>> seen;
  auto cb = [&](int depth, json::parse_event_t ev, json& parsed) {
    (void)depth;
    switch (ev) {
      case json::parse_event_t::object_start: seen.emplace_back(); break;
      case json::parse_event_t::object_end:
        if (!seen.empty()) seen.pop_back();
        break;
      case json::parse_event_t::key: {
        const std::string k = parsed.get<std::string>();
        if (!seen.empty() && !seen.back().insert(k).second) errors.push_back(k + ": duplicate key");
        break;
      }
      default: break;
    }
    return true;
  };
  return json::parse(text, cb);
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c = {"spectrum", "sweep", "ep-locate", "dynamics", "trajectories", "verify"};
  return c;
}

ParseResult parse_config(const std::string& text) {
  ParseResult out;
  json doc;
  try {
    doc = parse_strict(text, out.errors);
  } catch (const json::parse_error& e) {
    out.errors.push_back(std::string("parse error: ") + e.what());
    return out;
  }
  Checker c;
  c.errors = std::move(out.errors);
  if (!doc.is_object()) {
    c.err("(root)", "configuration must be a JSON object");
    out.errors = std::move(c.errors);
    return out;
  }
  c.only_keys(doc, "", {"command", "model", "sweep", "ep", "dynamics", "trajectories", "output", "tolerances"});

  RunConfig cfg;
  cfg.echo = doc.dump();

  // command
  if (const auto cmd = c.string(doc, "command", "command")) {
    bool known = false;
    for (const auto& k : known_commands()) known |= k == *cmd;
    if (!known) {
      std::string list;
      for (const auto& k : known_commands()) list += (list.empty() ? "" : ", ") + k;
      c.err("command", "unknown command '" + *cmd + "' (expected one of " + list + ")");
    }
    cfg.command = *cmd;
  } else if (!doc.contains("command")) {
    c.err("command", "required");
  }

  // model
  const ModelFamily* fam = nullptr;
  if (const json* m = c.object(doc, "model")) {
    if (const auto name = c.string(*m, "name", "model.name")) {
      try {
        fam = &model_family(*name);
        cfg.model = *name;
      } catch (const DomainError& e) {
        c.err("model.name", e.what());
      }
    } else if (!m->contains("name")) {
      c.err("model.name", "required");
    }
    ParamMap given;
    for (auto it = m->begin(); it != m->end(); ++it) {
      if (it.key() == "name") continue;
      if (!it.value().is_number()) {
        c.err("model." + it.key(), "must be a number");
        continue;
      }
      given[it.key()] = it.value().get<double>();
    }
    if (fam) {
      const auto errs = param_errors(*fam, given);
      c.errors.insert(c.errors.end(), errs.begin(), errs.end());
      if (errs.empty()) cfg.params = complete_params(*fam, given);
    }
  } else if (!doc.contains("model")) {
    c.err("model", "required");
  }

  // sweep
  if (const json* s = c.object(doc, "sweep")) {
    c.only_keys(*s, "sweep", {"param", "from", "to", "steps", "operator"});
    SweepSpec sw;
    if (fam) sw.param = fam->default_sweep_param;
    if (const auto p = c.string(*s, "param", "sweep.param")) sw.param = *p;
    if (fam) {
      bool ok = false;
      for (const auto& p : fam->params) ok |= p.name == sw.param;
      if (!ok || sw.param == "levels") c.err("sweep.param", "'" + sw.param + "' is not a sweepable parameter of " + fam->name);
    }
    const auto from = c.number(*s, "from", "sweep.from");
    const auto to = c.number(*s, "to", "sweep.to");
    if (!s->contains("from")) c.err("sweep.from", "required");
    if (!s->contains("to")) c.err("sweep.to", "required");
    if (from && to && !(*to > *from)) c.err("sweep.to", "must be greater than sweep.from");
    if (from) sw.from = *from;
    if (to) sw.to = *to;
    if (const auto n = c.integer(*s, "steps", "sweep.steps", 2, 100000)) sw.steps = static_cast<int>(*n);
    if (const auto op = c.string(*s, "operator", "sweep.operator")) {
      try {
        operator_kind_from_string(*op);
        sw.op = *op;
      } catch (const DomainError& e) {
        c.err("sweep.operator", e.what());
      }
    }
    // A swept rate must stay inside its domain over the whole range.
    if (fam && from && to) {
      for (const auto& p : fam->params) {
        if (p.name != sw.param) continue;
        if (p.domain == ParamSpec::Domain::NonNegative && *from < 0) c.err("sweep.from", "rate must be >= 0");
        if (p.domain == ParamSpec::Domain::Positive && !(*from > 0)) c.err("sweep.from", "must be > 0");
      }
    }
    cfg.sweep = sw;
  }

  // ep
  if (const json* e = c.object(doc, "ep")) {
    c.only_keys(*e, "ep", {"operator", "branch_pair"});
    if (const auto op = c.string(*e, "operator", "ep.operator")) {
      try {
        operator_kind_from_string(*op);
        cfg.ep.op = *op;
      } catch (const DomainError& ex) {
        c.err("ep.operator", ex.what());
      }
    }
    if (e->contains("branch_pair")) {
      const json& bp = e->at("branch_pair");
      if (!bp.is_array() || bp.size() != 2 || !bp[0].is_number_integer() || !bp[1].is_number_integer() ||
          bp[0].get<long long>() < 0 || bp[1].get<long long>() < 0 || bp[0] == bp[1]) {
        c.err("ep.branch_pair", "must be two distinct non-negative integers");
      } else {
        cfg.ep.branch_pair = std::make_pair(bp[0].get<int>(), bp[1].get<int>());
      }
    }
  }
  if (cfg.sweep && !doc.contains("ep") && doc.contains("sweep") && doc["sweep"].is_object() &&
      doc["sweep"].contains("operator"))
    cfg.ep.op = cfg.sweep->op;

  // dynamics
  if (const json* d = c.object(doc, "dynamics")) {
    c.only_keys(*d, "dynamics", {"rho0", "t_max", "n_times", "method", "operator"});
    DynamicsSpec dy;
    if (const auto st = c.state(*d, "rho0", "dynamics.rho0", true)) dy.rho0 = *st;
    if (const auto t = c.number(*d, "t_max", "dynamics.t_max")) {
      c.positive(t, "dynamics.t_max");
      dy.t_max = *t;
    }
    if (const auto n = c.integer(*d, "n_times", "dynamics.n_times", 2, 1000000)) dy.n_times = static_cast<int>(*n);
    if (const auto m = c.string(*d, "method", "dynamics.method")) {
      if (*m != "expm" && *m != "modes") c.err("dynamics.method", "must be expm or modes");
      dy.method = *m;
    }
    if (const auto op = c.string(*d, "operator", "dynamics.operator")) {
      if (*op != "liouvillian" && *op != "no_jump") c.err("dynamics.operator", "must be liouvillian or no_jump");
      dy.op = *op;
    }
    if (dy.method == "modes" && dy.op != "liouvillian") c.err("dynamics.method", "modes requires operator liouvillian");
    cfg.dynamics = dy;
  }

  // trajectories
  if (const json* t = c.object(doc, "trajectories")) {
    c.only_keys(*t, "trajectories", {"psi0", "n_traj", "dt", "t_max", "seed", "record_every"});
    TrajectorySpec tr;
    if (const auto st = c.state(*t, "psi0", "trajectories.psi0", false)) tr.psi0 = *st;
    if (const auto n = c.integer(*t, "n_traj", "trajectories.n_traj", 1, 10000000)) tr.n_traj = static_cast<int>(*n);
    if (const auto v = c.number(*t, "dt", "trajectories.dt")) {
      c.positive(v, "trajectories.dt");
      tr.dt = *v;
    }
    if (const auto v = c.number(*t, "t_max", "trajectories.t_max")) {
      c.positive(v, "trajectories.t_max");
      tr.t_max = *v;
    }
    if (tr.dt > 0 && tr.t_max > 0 && tr.t_max / tr.dt > 1e8) c.err("trajectories.dt", "more than 1e8 steps requested");
    if (const auto s = c.integer(*t, "seed", "trajectories.seed", 0, std::numeric_limits<long long>::max()))
      tr.seed = static_cast<std::uint64_t>(*s);
    if (const auto r = c.integer(*t, "record_every", "trajectories.record_every", 0, 100000000))
      tr.record_every = static_cast<int>(*r);
    cfg.trajectories = tr;
  }

  // output
  if (const auto o = c.string(doc, "output", "output")) {
    if (o->empty()) c.err("output", "must be a non-empty path prefix");
    cfg.output = *o;
  }

  // tolerances
  if (const json* t = c.object(doc, "tolerances")) {
    c.only_keys(*t, "tolerances", {"cluster", "zero", "defect", "rank", "param", "overlap_min"});
    auto tol = [&](const char* k, double& slot) {
      if (const auto v = c.number(*t, k, std::string("tolerances.") + k)) {
        if (!(*v > 0 && *v < 1)) c.err(std::string("tolerances.") + k, "must be in (0, 1)");
        slot = *v;
      }
    };
    tol("cluster", cfg.tolerances.cluster);
    tol("zero", cfg.tolerances.zero);
    tol("defect", cfg.tolerances.defect);
    tol("rank", cfg.tolerances.rank);
    tol("param", cfg.tolerances.param);
    if (const auto v = c.number(*t, "overlap_min", "tolerances.overlap_min")) {
      if (*v < 0 || *v > 1) c.err("tolerances.overlap_min", "must be in [0, 1]");
      cfg.tolerances.overlap_min = *v;
    }
  }

  // Command-specific requirements.
  if (cfg.command == "sweep" || cfg.command == "ep-locate") {
    if (!doc.contains("sweep")) c.err("sweep", "required for command " + cfg.command);
  }
  if (cfg.command == "dynamics" && !cfg.dynamics) cfg.dynamics = DynamicsSpec{};
  if (cfg.command == "trajectories" && !cfg.trajectories) cfg.trajectories = TrajectorySpec{};

  // Qubit-only state names.
  if (fam && fam->name != "example1" && fam->name != "example2") {
    if (cfg.dynamics && cfg.dynamics->rho0.kind == "qubit") c.err("dynamics.rho0", "g/e states need a qubit model");
    if (cfg.trajectories && cfg.trajectories->psi0.kind == "qubit")
      c.err("trajectories.psi0", "g/e states need a qubit model");
  }

  out.errors = std::move(c.errors);
  if (out.errors.empty()) out.config = std::move(cfg);
  return out;
}

}  // namespace lioueps::cli
