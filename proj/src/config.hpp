#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "types.hpp"

namespace starsec {

/// Penalty schedule parameters. The update rule is
/// value <- min(beta * value, cap); with the default beta < 1 and
/// cap < init the sequence decreases and keeps decreasing after the cap
/// first binds. Both knobs are exposed so an increasing schedule can be
/// configured instead.
struct PccpSchedule {
  double lambda_init = 20.0;
  double lambda_max = 10.0;
  double kappa_init = 20.0;
  double kappa_max = 10.0;
  double beta = 0.8;
};

/// All scalar system parameters, in linear units. dB/dBW values are
/// converted at the config boundary (file parser, CLI); everything
/// downstream computes in linear units only.
struct SystemConfig {
  int num_antennas = 4;   // N_t
  int num_elements = 40;  // M

  double noise_bob_t = 1.0;
  double noise_bob_r = 1.0;
  double noise_eve_t = 1.0;
  double noise_eve_r = 1.0;

  double p_max = 1.0;   // linear W (0 dBW)
  double sop_bound = 0.5;
  double e_min = 0.01;  // linear (-20 dB)
  double eta = 1.0;     // harvesting efficiency

  double pathloss_exponent = 2.2;
  // Reference gain at d0 = 1 m. Never stated in the source setup; 10 gives
  // moderate SNR at the default geometry (unit noise, 1 W budget) and keeps
  // the default energy demand satisfiable across the Eve distance range.
  double reference_gain = 10.0;
  double d_bs_ris = 10.0;
  double d_ris_bob = 10.0;
  double eve_dist_min = 0.0;
  double eve_dist_max = 10.0;
  double eve_dist_floor = 0.5;  // draws below this are re-sampled

  PccpSchedule pccp;

  double tolerance = 1e-3;   // outer AO stopping epsilon
  double solver_tol = 1e-6;  // inner subproblem KKT tolerance
  int max_iters = 30;
  int trials = 20;
  std::uint64_t rng_seed = 1;

  double noise_bob(Region k) const { return k == Region::transmit ? noise_bob_t : noise_bob_r; }
  double noise_eve(Region k) const { return k == Region::transmit ? noise_eve_t : noise_eve_r; }
};

double db_to_linear(double x_db);
double linear_to_db(double x_lin);

/// Checks every SystemConfig invariant and returns all violations (empty
/// when the config is valid).
std::vector<std::string> validate_config(const SystemConfig& cfg);

/// key = value text form, one field per line, '#' comments. Field names
/// match the struct members; p_max_dbw / e_min_db accept dB-scale values
/// and are what the serializer writes.
std::string serialize_config(const SystemConfig& cfg);

/// Applies one key/value entry. Returns false and fills *err (if given)
/// on unknown keys or unparsable values.
bool apply_config_entry(SystemConfig& cfg, std::string_view key, std::string_view value,
                        std::string* err = nullptr);

/// Parses config text on top of defaults. Parse problems are appended to
/// *errors; the returned config has all successfully parsed fields applied.
SystemConfig parse_config_text(const std::string& text, std::vector<std::string>* errors = nullptr);

SystemConfig load_config_file(const std::string& path, std::vector<std::string>* errors = nullptr);

}  // namespace starsec
