#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "rodeo/complex_linalg.hpp"
#include "rodeo/master_equation.hpp"
#include "rodeo/rate_operator.hpp"

namespace rodeo {

struct RunConfig {
  std::string mode;  // exact | jump | nmqj | witness | compare
  MasterEquation model;
  std::string preset_name;  // empty when the model was given inline
  CVector initial_state;
  TransformationStrategy strategy;
  std::string strategy_name;
  double dt = 1e-3;
  double t_max = 1.0;
  long n_traj = 1000;
  std::uint64_t seed = 0;
  double max_event_prob = 0.1;
  int threads = 1;
  std::string out_dir = "out";
  std::string compare_engine = "jump";  // engine used by compare mode
  double compare_z_tol = 5.0;
  double compare_abs_floor = 0.02;
};

// Builds a RunConfig from a JSON document, collecting every problem found
// into one SchemaError. Unknown keys are rejected at every level.
RunConfig parse_config(const nlohmann::json& j);

// Reads and parses a config file; file and JSON syntax errors also surface
// as SchemaError.
RunConfig load_config(const std::string& path);

// Named models usable as "model": {"preset": ...}.
//   pauli_isotropic      gx = gy = gz = 1, H = sigma_z
//   dephasing            gz = 1, H = 0
//   pauli_nonPdiv_demo   gx = gy = 0.1, gz(t) = 0.5 cos 2t, H = (1 + 0.5 sin t) sigma_z
//   unphysical_dephasing gz = -0.5, H = 0
MasterEquation make_preset(const std::string& name);

// plus, minus, zero, one, plus_i, minus_i
CVector named_state(const std::string& name);

}  // namespace rodeo
