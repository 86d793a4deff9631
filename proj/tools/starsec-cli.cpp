// starsec command-line front end. Talks to the library exclusively through
// the C API in starsec.h; all numerics live behind it.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "starsec.h"

namespace {

constexpr size_t kBufLen = 1 << 20;

struct ConfigHandle {
  starsec_config* cfg = starsec_config_create();
  ~ConfigHandle() { starsec_config_free(cfg); }
};

struct FieldFlag {
  const char* flag;
  const char* key;
  const char* help;
};

// Every SystemConfig field is reachable from the command line.
const std::vector<FieldFlag> kFieldFlags = {
    {"--m", "num_elements", "STAR-RIS element count M"},
    {"--n-t", "num_antennas", "BS antenna count N_t"},
    {"--p-max-dbw", "p_max_dbw", "transmit power budget (dBW)"},
    {"--e-min-db", "e_min_db", "eavesdropper energy demand (dB)"},
    {"--delta", "sop_bound", "secrecy outage bound in (0,1)"},
    {"--eta", "eta", "energy harvesting efficiency"},
    {"--noise-bob-t", "noise_bob_t", "Bob_t noise power (linear)"},
    {"--noise-bob-r", "noise_bob_r", "Bob_r noise power (linear)"},
    {"--noise-eve-t", "noise_eve_t", "Eve_t noise power (linear)"},
    {"--noise-eve-r", "noise_eve_r", "Eve_r noise power (linear)"},
    {"--pathloss-exponent", "pathloss_exponent", "path loss exponent"},
    {"--reference-gain", "reference_gain", "path gain at 1 m (linear)"},
    {"--d-bs-ris", "d_bs_ris", "BS to STAR-RIS distance (m)"},
    {"--d-ris-bob", "d_ris_bob", "STAR-RIS to Bob distance (m)"},
    {"--eve-dist-min", "eve_dist_min", "Eve distance draw lower edge (m)"},
    {"--eve-dist-max", "eve_dist_max", "Eve distance draw upper edge (m)"},
    {"--eve-dist-floor", "eve_dist_floor", "resample Eve draws below this (m)"},
    {"--lambda-init", "lambda_init", "slack penalty initial value"},
    {"--lambda-max", "lambda_max", "slack penalty cap"},
    {"--kappa-init", "kappa_init", "binarity penalty initial value"},
    {"--kappa-max", "kappa_max", "binarity penalty cap"},
    {"--beta", "beta", "penalty schedule factor"},
    {"--tolerance", "tolerance", "outer stopping tolerance"},
    {"--solver-tol", "solver_tol", "inner KKT tolerance"},
    {"--max-iters", "max_iters", "outer iteration cap"},
    {"--trials", "trials", "default trials per sweep point"},
};

int die(const std::string& context)
{
  std::cerr << "error: " << context;
  const char* detail = starsec_last_error();
  if (detail && detail[0]) std::cerr << ": " << detail;
  std::cerr << "\n";
  return 1;
}

int apply_overrides(starsec_config* cfg, const std::string& config_path,
                    const std::vector<std::pair<std::string, std::string>>& values,
                    const std::vector<std::string>& sets)
{
  if (!config_path.empty() && starsec_config_load(cfg, config_path.c_str()) != STARSEC_OK)
    return die("loading config " + config_path);
  for (const auto& [key, value] : values) {
    if (!value.empty() && starsec_config_set(cfg, key.c_str(), value.c_str()) != STARSEC_OK)
      return die("setting " + key);
  }
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got " << kv << "\n";
      return 1;
    }
    if (starsec_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()) !=
        STARSEC_OK)
      return die("setting " + kv);
  }
  std::string buf(4096, '\0');
  if (starsec_config_validate(cfg, buf.data(), buf.size()) != STARSEC_OK)
    return die("invalid configuration");
  return 0;
}

std::string join_path(const std::string& dir, const std::string& name)
{
  if (dir.empty() || dir == ".") return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Outage-constrained sum-secrecy-rate optimization for STAR-RIS-aided MISO "
               "wiretap systems"};
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string dump_config_path;
  std::vector<std::string> set_entries;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_option("--dump-config", dump_config_path,
                 "write the effective configuration to this path and exit");
  app.add_option("--set", set_entries, "override any config field as key=value")
      ->take_all();

  std::vector<std::pair<std::string, std::string>> field_values(kFieldFlags.size());
  for (size_t i = 0; i < kFieldFlags.size(); ++i) {
    field_values[i].first = kFieldFlags[i].key;
    app.add_option(kFieldFlags[i].flag, field_values[i].second, kFieldFlags[i].help);
  }

  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "master RNG seed");

  // run
  auto* run_cmd = app.add_subcommand("run", "single optimization on one channel draw");
  std::string baseline = "es-ipcsi";
  std::string out_dir = ".";
  std::string channels_in, channels_out;
  bool write_trace = false;
  run_cmd->add_option("--baseline", baseline,
                      "es-ipcsi | ms-ipcsi | ris-ipcsi | es-pcsi | ms-pcsi");
  run_cmd->add_option("--out-dir", out_dir, "output directory");
  run_cmd->add_option("--channels-in", channels_in, "load channels from a dump instead of drawing");
  run_cmd->add_option("--channels-out", channels_out, "save the drawn channels to this path");
  run_cmd->add_flag("--trace", write_trace, "write the per-iteration trace CSV");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep with trial averaging");
  std::string sweep_param = "m";
  std::string sweep_values = "10,20,40";
  std::string sweep_baselines = "es-ipcsi";
  std::string sweep_spec_file;
  std::string sweep_out_dir = ".";
  int sweep_trials = -1;
  bool paper_trials = false;
  bool timing = false;
  bool no_plot = false;
  sweep_cmd->add_option("--param", sweep_param, "m | n-t | e-min-db | p-max-dbw | delta");
  sweep_cmd->add_option("--values", sweep_values, "comma-separated sweep values");
  sweep_cmd->add_option("--baselines", sweep_baselines, "comma-separated baseline names");
  sweep_cmd->add_option("--sweep-trials", sweep_trials, "trials per sweep point");
  sweep_cmd->add_flag("--paper-trials", paper_trials, "use 100 trials per point");
  sweep_cmd->add_flag("--timing", timing,
                      "record wall time (makes the CSV non-reproducible byte-for-byte)");
  sweep_cmd->add_flag("--no-plot", no_plot, "skip the SVG plot");
  sweep_cmd->add_option("--spec", sweep_spec_file, "sweep description file (overrides flags)");
  sweep_cmd->add_option("--out-dir", sweep_out_dir, "output directory");

  // verify-sop
  auto* verify_cmd = app.add_subcommand("verify-sop",
                                        "closed-form outage probability vs sampling oracle");
  int instances = 50;
  std::int64_t samples = 100000;
  verify_cmd->add_option("--instances", instances, "number of random instances");
  verify_cmd->add_option("--samples", samples, "Monte Carlo samples per instance");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "optimizer vs brute-force grid on tiny instances");
  std::string oracle_protocol = "es";
  int oracle_seeds = 20;
  oracle_cmd->add_option("--protocol", oracle_protocol, "es | ms");
  oracle_cmd->add_option("--seeds", oracle_seeds, "number of channel draws");

  CLI11_PARSE(app, argc, argv);

  ConfigHandle handle;
  if (!handle.cfg) return die("allocating config");
  if (int rc = apply_overrides(handle.cfg, config_path, field_values, set_entries); rc != 0)
    return rc;

  if (!dump_config_path.empty()) {
    std::string buf(kBufLen, '\0');
    if (starsec_config_dump(handle.cfg, buf.data(), buf.size()) != STARSEC_OK)
      return die("serializing config");
    std::ofstream f(dump_config_path);
    f << buf.c_str();
    if (!f.flush()) return die("writing " + dump_config_path);
    std::cout << "wrote " << dump_config_path << "\n";
    if (app.get_subcommands().empty()) return 0;
  }

  if (run_cmd->parsed()) {
    starsec_channels* ch = nullptr;
    if (!channels_in.empty()) {
      if (starsec_channels_load(channels_in.c_str(), &ch) != STARSEC_OK)
        return die("loading channels " + channels_in);
    } else if (starsec_channels_generate(handle.cfg, seed, &ch) != STARSEC_OK) {
      return die("generating channels");
    }
    std::unique_ptr<starsec_channels, decltype(&starsec_channels_free)> ch_guard(
        ch, starsec_channels_free);
    if (!channels_out.empty() &&
        starsec_channels_save(ch, channels_out.c_str()) != STARSEC_OK)
      return die("saving channels " + channels_out);

    starsec_result* res = nullptr;
    const int rc = starsec_run(handle.cfg, ch, baseline.c_str(), &res);
    if (res == nullptr) return die("running " + baseline);
    std::unique_ptr<starsec_result, decltype(&starsec_result_free)> res_guard(
        res, starsec_result_free);

    double ssr = 0, iters = 0;
    starsec_result_metric(res, "ssr", &ssr);
    starsec_result_metric(res, "iterations", &iters);
    std::printf("baseline:   %s\nstatus:     %s\niterations: %d\nssr:        %.6f bits/s/Hz\n",
                baseline.c_str(), starsec_result_status(res), static_cast<int>(iters), ssr);
    for (const char* name : {"ssr_pcsi", "energy_t", "energy_r", "s_star_t", "s_star_r"}) {
      double v = 0;
      starsec_result_metric(res, name, &v);
      std::printf("%-11s %.6g\n", (std::string(name) + ":").c_str(), v);
    }

    std::string buf(kBufLen, '\0');
    if (starsec_result_report_csv(res, buf.data(), buf.size()) == STARSEC_OK) {
      std::ofstream f(join_path(out_dir, "report.csv"));
      f << starsec_report_header() << "\n" << buf.c_str() << "\n";
    }
    if (write_trace && starsec_result_trace_csv(res, buf.data(), buf.size()) == STARSEC_OK) {
      std::ofstream f(join_path(out_dir, "trace.csv"));
      f << buf.c_str();
    }
    if (rc == STARSEC_INFEASIBLE) {
      std::cerr << "infeasible: " << starsec_last_error() << "\n";
      return 2;
    }
    return rc == STARSEC_OK ? 0 : die("run failed");
  }

  if (sweep_cmd->parsed()) {
    const std::string csv = join_path(sweep_out_dir, "sweep.csv");
    const std::string svg = join_path(sweep_out_dir, "sweep.svg");
    int rc;
    if (!sweep_spec_file.empty()) {
      rc = starsec_sweep_file(handle.cfg, sweep_spec_file.c_str(), csv.c_str(),
                              no_plot ? nullptr : svg.c_str());
    } else {
      std::vector<double> values;
      std::string tok;
      std::istringstream vs(sweep_values);
      while (std::getline(vs, tok, ',')) values.push_back(std::stod(tok));
      int trials = sweep_trials;
      if (paper_trials) trials = 100;
      if (trials <= 0) {
        std::string buf(kBufLen, '\0');
        starsec_config_dump(handle.cfg, buf.data(), buf.size());
        trials = 20;
        std::istringstream cs(buf.c_str());
        std::string line;
        while (std::getline(cs, line))
          if (line.rfind("trials = ", 0) == 0) trials = std::atoi(line.c_str() + 9);
      }
      rc = starsec_sweep(handle.cfg, sweep_param.c_str(), values.data(), values.size(),
                         sweep_baselines.c_str(), trials, seed, timing ? 1 : 0, csv.c_str(),
                         no_plot ? nullptr : svg.c_str());
    }
    if (rc == STARSEC_OK || rc == STARSEC_INFEASIBLE) {
      std::cout << "wrote " << csv;
      if (!no_plot) std::cout << " and " << svg;
      std::cout << "\n";
    }
    if (rc == STARSEC_INFEASIBLE) {
      std::cerr << "infeasible cells: " << starsec_last_error() << "\n";
      return 2;
    }
    return rc == STARSEC_OK ? 0 : die("sweep failed");
  }

  if (verify_cmd->parsed()) {
    std::string buf(kBufLen, '\0');
    const int rc = starsec_verify_sop(instances, samples, seed, buf.data(), buf.size());
    std::cout << buf.c_str();
    return rc == STARSEC_OK ? 0 : 1;
  }

  if (oracle_cmd->parsed()) {
    int hits = 0, total = 0;
    std::printf("seed   optimizer        oracle         ratio\n");
    for (int s = 0; s < oracle_seeds; ++s) {
      starsec_channels* ch = nullptr;
      if (starsec_channels_generate(handle.cfg, seed + s, &ch) != STARSEC_OK)
        return die("generating channels");
      std::unique_ptr<starsec_channels, decltype(&starsec_channels_free)> ch_guard(
          ch, starsec_channels_free);

      const std::string run_baseline_name =
          oracle_protocol == "ms" ? "ms-ipcsi" : "es-ipcsi";
      starsec_result* res = nullptr;
      const int rc = starsec_run(handle.cfg, ch, run_baseline_name.c_str(), &res);
      std::unique_ptr<starsec_result, decltype(&starsec_result_free)> res_guard(
          res, starsec_result_free);
      if (rc == STARSEC_INFEASIBLE) {
        std::printf("%4d   (infeasible instance, skipped)\n", s);
        continue;
      }
      if (rc != STARSEC_OK || !res) return die("optimizer run");

      double algo = 0, best = 0;
      starsec_result_metric(res, "ssr", &algo);
      if (starsec_oracle_ssr(handle.cfg, ch, oracle_protocol.c_str(), &best) == STARSEC_ERROR)
        return die("oracle search");
      const double ratio = best > 1e-12 ? algo / best : 1.0;
      ++total;
      if (ratio >= 0.95) ++hits;
      std::printf("%4d   %12.6f   %12.6f   %8.4f\n", s, algo, best, ratio);
    }
    std::printf("ratio >= 0.95 on %d / %d instances\n", hits, total);
    return 0;
  }

  if (!dump_config_path.empty()) return 0;
  std::cout << app.help();
  return 0;
}
