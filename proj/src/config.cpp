#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace starsec {

double db_to_linear(double x_db) { return std::pow(10.0, x_db / 10.0); }

double linear_to_db(double x_lin) { return 10.0 * std::log10(x_lin); }

std::vector<std::string> validate_config(const SystemConfig& cfg)
{
  std::vector<std::string> errs;
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) errs.push_back(msg);
  };

  require(cfg.num_antennas > 0, "num_antennas must be positive");
  require(cfg.num_elements > 0, "num_elements must be positive");
  require(cfg.noise_bob_t > 0 && cfg.noise_bob_r > 0, "noise_bob must be positive");
  require(cfg.noise_eve_t > 0 && cfg.noise_eve_r > 0, "noise_eve must be positive");
  require(cfg.p_max > 0, "p_max must be positive");
  require(cfg.sop_bound > 0 && cfg.sop_bound < 1, "sop_bound out of (0,1)");
  require(cfg.e_min >= 0, "e_min must be non-negative");
  require(cfg.eta >= 0 && cfg.eta <= 1, "eta out of [0,1]");
  require(cfg.pathloss_exponent > 0, "pathloss_exponent must be positive");
  require(cfg.reference_gain > 0, "reference_gain must be positive");
  require(cfg.d_bs_ris > 0, "d_bs_ris must be positive");
  require(cfg.d_ris_bob > 0, "d_ris_bob must be positive");
  require(cfg.eve_dist_min >= 0, "eve_dist_min must be non-negative");
  require(cfg.eve_dist_max > cfg.eve_dist_min, "eve_dist_max must exceed eve_dist_min");
  require(cfg.eve_dist_floor > 0, "eve_dist_floor must be positive");
  require(cfg.eve_dist_floor < cfg.eve_dist_max, "eve_dist_floor must be below eve_dist_max");
  require(cfg.pccp.lambda_init > 0, "pccp.lambda_init must be positive");
  require(cfg.pccp.lambda_max > 0, "pccp.lambda_max must be positive");
  require(cfg.pccp.kappa_init > 0, "pccp.kappa_init must be positive");
  require(cfg.pccp.kappa_max > 0, "pccp.kappa_max must be positive");
  require(cfg.pccp.beta > 0, "pccp.beta must be positive");
  require(cfg.tolerance > 0, "tolerance must be positive");
  require(cfg.solver_tol > 0, "solver_tol must be positive");
  require(cfg.max_iters > 0, "max_iters must be positive");
  require(cfg.trials > 0, "trials must be positive");
  return errs;
}

namespace {

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool parse_double(std::string_view s, double& out)
{
  try {
    size_t pos = 0;
    out = std::stod(std::string(s), &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_int(std::string_view s, int& out)
{
  double d;
  if (!parse_double(s, d) || d != std::floor(d)) return false;
  out = static_cast<int>(d);
  return true;
}

bool parse_u64(std::string_view s, std::uint64_t& out)
{
  auto first = s.data();
  auto last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && p == last;
}

std::string_view trim(std::string_view s)
{
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string serialize_config(const SystemConfig& cfg)
{
  std::ostringstream os;
  os << "# starsec configuration (defaults shown; '#' starts a comment)\n";
  os << "num_antennas = " << cfg.num_antennas << "\n";
  os << "num_elements = " << cfg.num_elements << "\n";
  os << "noise_bob_t = " << fmt(cfg.noise_bob_t) << "\n";
  os << "noise_bob_r = " << fmt(cfg.noise_bob_r) << "\n";
  os << "noise_eve_t = " << fmt(cfg.noise_eve_t) << "\n";
  os << "noise_eve_r = " << fmt(cfg.noise_eve_r) << "\n";
  os << "p_max_dbw = " << fmt(linear_to_db(cfg.p_max)) << "\n";
  os << "e_min_db = " << fmt(cfg.e_min > 0 ? linear_to_db(cfg.e_min) : -300.0) << "\n";
  os << "sop_bound = " << fmt(cfg.sop_bound) << "\n";
  os << "eta = " << fmt(cfg.eta) << "\n";
  os << "pathloss_exponent = " << fmt(cfg.pathloss_exponent) << "\n";
  os << "reference_gain = " << fmt(cfg.reference_gain) << "\n";
  os << "d_bs_ris = " << fmt(cfg.d_bs_ris) << "\n";
  os << "d_ris_bob = " << fmt(cfg.d_ris_bob) << "\n";
  os << "eve_dist_min = " << fmt(cfg.eve_dist_min) << "\n";
  os << "eve_dist_max = " << fmt(cfg.eve_dist_max) << "\n";
  os << "eve_dist_floor = " << fmt(cfg.eve_dist_floor) << "\n";
  os << "lambda_init = " << fmt(cfg.pccp.lambda_init) << "\n";
  os << "lambda_max = " << fmt(cfg.pccp.lambda_max) << "\n";
  os << "kappa_init = " << fmt(cfg.pccp.kappa_init) << "\n";
  os << "kappa_max = " << fmt(cfg.pccp.kappa_max) << "\n";
  os << "beta = " << fmt(cfg.pccp.beta) << "\n";
  os << "tolerance = " << fmt(cfg.tolerance) << "\n";
  os << "solver_tol = " << fmt(cfg.solver_tol) << "\n";
  os << "max_iters = " << cfg.max_iters << "\n";
  os << "trials = " << cfg.trials << "\n";
  os << "rng_seed = " << cfg.rng_seed << "\n";
  return os.str();
}

bool apply_config_entry(SystemConfig& cfg, std::string_view key, std::string_view value,
                        std::string* err)
{
  key = trim(key);
  value = trim(value);
  auto fail = [&](const std::string& msg) {
    if (err) *err = msg;
    return false;
  };

  double d = 0;
  int i = 0;
  auto want_double = [&]() { return parse_double(value, d); };
  auto want_int = [&]() { return parse_int(value, i); };

  if (key == "num_antennas") {
    if (!want_int()) return fail("num_antennas: not an integer");
    cfg.num_antennas = i;
  } else if (key == "num_elements") {
    if (!want_int()) return fail("num_elements: not an integer");
    cfg.num_elements = i;
  } else if (key == "noise_bob_t" || key == "noise_bob_r" || key == "noise_eve_t" ||
             key == "noise_eve_r" || key == "sop_bound" || key == "eta" ||
             key == "pathloss_exponent" || key == "reference_gain" || key == "d_bs_ris" ||
             key == "d_ris_bob" || key == "eve_dist_min" || key == "eve_dist_max" ||
             key == "eve_dist_floor" || key == "lambda_init" || key == "lambda_max" ||
             key == "kappa_init" || key == "kappa_max" || key == "beta" || key == "tolerance" ||
             key == "solver_tol" || key == "p_max" || key == "e_min" || key == "p_max_dbw" ||
             key == "e_min_db") {
    if (!want_double()) return fail(std::string(key) + ": not a number");
    if (key == "noise_bob_t") cfg.noise_bob_t = d;
    else if (key == "noise_bob_r") cfg.noise_bob_r = d;
    else if (key == "noise_eve_t") cfg.noise_eve_t = d;
    else if (key == "noise_eve_r") cfg.noise_eve_r = d;
    else if (key == "sop_bound") cfg.sop_bound = d;
    else if (key == "eta") cfg.eta = d;
    else if (key == "pathloss_exponent") cfg.pathloss_exponent = d;
    else if (key == "reference_gain") cfg.reference_gain = d;
    else if (key == "d_bs_ris") cfg.d_bs_ris = d;
    else if (key == "d_ris_bob") cfg.d_ris_bob = d;
    else if (key == "eve_dist_min") cfg.eve_dist_min = d;
    else if (key == "eve_dist_max") cfg.eve_dist_max = d;
    else if (key == "eve_dist_floor") cfg.eve_dist_floor = d;
    else if (key == "lambda_init") cfg.pccp.lambda_init = d;
    else if (key == "lambda_max") cfg.pccp.lambda_max = d;
    else if (key == "kappa_init") cfg.pccp.kappa_init = d;
    else if (key == "kappa_max") cfg.pccp.kappa_max = d;
    else if (key == "beta") cfg.pccp.beta = d;
    else if (key == "tolerance") cfg.tolerance = d;
    else if (key == "solver_tol") cfg.solver_tol = d;
    else if (key == "p_max") cfg.p_max = d;
    else if (key == "e_min") cfg.e_min = d;
    else if (key == "p_max_dbw") cfg.p_max = db_to_linear(d);
    else if (key == "e_min_db") cfg.e_min = db_to_linear(d);
  } else if (key == "max_iters") {
    if (!want_int()) return fail("max_iters: not an integer");
    cfg.max_iters = i;
  } else if (key == "trials") {
    if (!want_int()) return fail("trials: not an integer");
    cfg.trials = i;
  } else if (key == "rng_seed") {
    std::uint64_t u;
    if (!parse_u64(value, u)) return fail("rng_seed: not a 64-bit unsigned integer");
    cfg.rng_seed = u;
  } else {
    return fail("unknown config key: " + std::string(key));
  }
  return true;
}

SystemConfig parse_config_text(const std::string& text, std::vector<std::string>* errors)
{
  SystemConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      if (errors) errors->push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string err;
    if (!apply_config_entry(cfg, sv.substr(0, eq), sv.substr(eq + 1), &err) && errors) {
      errors->push_back("line " + std::to_string(lineno) + ": " + err);
    }
  }
  return cfg;
}

SystemConfig load_config_file(const std::string& path, std::vector<std::string>* errors)
{
  std::ifstream f(path);
  if (!f) {
    if (errors) errors->push_back("cannot open config file: " + path);
    return SystemConfig{};
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str(), errors);
}

}  // namespace starsec
