// config.hpp — strict JSON run configuration for the lioueps CLI.

#pragma once

#include "lioueps/models.hpp"
#include "lioueps/ops_core.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lioueps::cli {

/// "g" | "e" (qubits), "basis:K", "mixed" (density matrices only),
/// "steady" (dynamics only) or an explicit amplitude list.
struct StateSpec {
  std::string kind = "basis";  // basis | mixed | steady | amplitudes
  int index = 0;
  std::vector<cplx> amplitudes;
};

struct SweepSpec {
  std::string param;
  double from = 0;
  double to = 1;
  int steps = 64;
  std::string op = "liouvillian";
};

struct EpSpec {
  std::string op = "liouvillian";
  std::optional<std::pair<int, int>> branch_pair;
};

struct DynamicsSpec {
  StateSpec rho0;
  double t_max = 10;
  int n_times = 101;
  std::string method = "expm";  // expm | modes
  std::string op = "liouvillian";  // liouvillian | no_jump
};

struct TrajectorySpec {
  StateSpec psi0;
  int n_traj = 1000;
  double dt = 1e-3;
  double t_max = 5;
  std::uint64_t seed = 0;
  int record_every = 0;
};

struct Tolerances {
  double cluster = 1e-8;
  double zero = 1e-10;
  double defect = 1e-10;
  double rank = 1e-8;
  double param = 1e-14;
  double overlap_min = -1;  // < 0: automatic (all pairs up to 32 branches, else >= 0.1)
};

struct RunConfig {
  std::string command;
  std::string model;
  ParamMap params;  // completed with defaults
  std::optional<SweepSpec> sweep;
  EpSpec ep;
  std::optional<DynamicsSpec> dynamics;
  std::optional<TrajectorySpec> trajectories;
  std::string output = "lioueps";
  Tolerances tolerances;
  std::string echo;  // compact JSON of the input document
};

struct ParseResult {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;  // every problem found, not just the first
};

ParseResult parse_config(const std::string& text);

const std::vector<std::string>& known_commands();

}  // namespace lioueps::cli
