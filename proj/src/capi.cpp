#include "starsec.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>

#include "baselines.hpp"
#include "channel.hpp"
#include "config.hpp"
#include "gridsearch.hpp"
#include "metrics.hpp"
#include "optimizer.hpp"
#include "sweep.hpp"
#include "verify.hpp"

using namespace starsec;

namespace {

thread_local std::string g_last_error;

int fail(const std::string& msg, int code = STARSEC_ERROR)
{
  g_last_error = msg;
  return code;
}

int copy_out(const std::string& s, char* buf, size_t buflen)
{
  if (buf == nullptr || buflen == 0) return fail("output buffer is null/empty");
  const size_t n = std::min(s.size(), buflen - 1);
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
  return n < s.size() ? fail("output truncated") : STARSEC_OK;
}

template <typename Fn>
int guarded(Fn&& fn)
{
  try {
    return fn();
  } catch (const std::exception& e) {
    return fail(e.what());
  } catch (...) {
    return fail("unknown error");
  }
}

}  // namespace

struct starsec_config {
  SystemConfig cfg;
};

struct starsec_channels {
  ChannelSet ch;
};

struct starsec_result {
  RunResult res;
};

extern "C" {

const char* starsec_version(void) { return "1.0.0"; }

const char* starsec_last_error(void) { return g_last_error.c_str(); }

starsec_config* starsec_config_create(void) { return new (std::nothrow) starsec_config{}; }

void starsec_config_free(starsec_config* cfg) { delete cfg; }

int starsec_config_set(starsec_config* cfg, const char* key, const char* value)
{
  if (!cfg || !key || !value) return fail("null argument");
  std::string err;
  if (!apply_config_entry(cfg->cfg, key, value, &err)) return fail(err);
  return STARSEC_OK;
}

int starsec_config_load(starsec_config* cfg, const char* path)
{
  if (!cfg || !path) return fail("null argument");
  return guarded([&]() {
    std::ifstream f(path);
    if (!f) return fail(std::string("cannot open config file: ") + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    std::vector<std::string> errors;
    SystemConfig fresh = parse_config_text(buf.str(), &errors);
    if (!errors.empty()) {
      std::string joined;
      for (const auto& e : errors) joined += e + "; ";
      return fail(joined);
    }
    cfg->cfg = fresh;
    return STARSEC_OK;
  });
}

int starsec_config_dump(const starsec_config* cfg, char* buf, size_t buflen)
{
  if (!cfg) return fail("null config");
  return copy_out(serialize_config(cfg->cfg), buf, buflen);
}

int starsec_config_validate(const starsec_config* cfg, char* buf, size_t buflen)
{
  if (!cfg) return fail("null config");
  const auto errs = validate_config(cfg->cfg);
  std::string joined;
  for (const auto& e : errs) {
    if (!joined.empty()) joined += "\n";
    joined += e;
  }
  if (buf && buflen) copy_out(joined, buf, buflen);
  return errs.empty() ? STARSEC_OK : fail(joined);
}

int starsec_channels_generate(const starsec_config* cfg, uint64_t seed, starsec_channels** out)
{
  if (!cfg || !out) return fail("null argument");
  return guarded([&]() {
    const auto errs = validate_config(cfg->cfg);
    if (!errs.empty()) return fail("invalid config: " + errs.front());
    *out = new starsec_channels{generate_channels(cfg->cfg, seed)};
    return STARSEC_OK;
  });
}

int starsec_channels_save(const starsec_channels* ch, const char* path)
{
  if (!ch || !path) return fail("null argument");
  return guarded([&]() {
    save_channels_file(ch->ch, path);
    return STARSEC_OK;
  });
}

int starsec_channels_load(const char* path, starsec_channels** out)
{
  if (!path || !out) return fail("null argument");
  return guarded([&]() {
    *out = new starsec_channels{load_channels_file(path)};
    return STARSEC_OK;
  });
}

void starsec_channels_free(starsec_channels* ch) { delete ch; }

int starsec_run(const starsec_config* cfg, const starsec_channels* ch, const char* baseline,
                starsec_result** out)
{
  if (!cfg || !ch || !baseline || !out) return fail("null argument");
  return guarded([&]() {
    const auto kind = parse_baseline(baseline);
    if (!kind) return fail(std::string("unknown baseline: ") + baseline);
    auto* res = new starsec_result{run_baseline(*kind, cfg->cfg, ch->ch)};
    *out = res;
    if (res->res.status == RunStatus::infeasible)
      return fail(res->res.message.empty() ? "infeasible instance" : res->res.message,
                  STARSEC_INFEASIBLE);
    return STARSEC_OK;
  });
}

int starsec_result_metric(const starsec_result* res, const char* name, double* out)
{
  if (!res || !name || !out) return fail("null argument");
  const RunResult& r = res->res;
  const SecrecyReport& rep = r.report;
  const std::string key(name);
  if (key == "ssr") *out = rep.ssr_outage;
  else if (key == "ssr_pcsi") *out = rep.ssr_pcsi;
  else if (key == "energy_t") *out = rep.energy.t;
  else if (key == "energy_r") *out = rep.energy.r;
  else if (key == "s_star_t") *out = rep.s_star.t;
  else if (key == "s_star_r") *out = rep.s_star.r;
  else if (key == "sop_t") *out = rep.sop.t;
  else if (key == "sop_r") *out = rep.sop.r;
  else if (key == "gamma_b_t") *out = rep.gamma_bob.t;
  else if (key == "gamma_b_r") *out = rep.gamma_bob.r;
  else if (key == "gamma_e_t") *out = rep.gamma_eve.t;
  else if (key == "gamma_e_r") *out = rep.gamma_eve.r;
  else if (key == "iterations") *out = r.iterations;
  else if (key == "converged") *out = r.status == RunStatus::converged ? 1.0 : 0.0;
  else if (key == "used_sop") *out = r.used_sop ? 1.0 : 0.0;
  else return fail("unknown metric: " + key);
  return STARSEC_OK;
}

int starsec_result_report_csv(const starsec_result* res, char* buf, size_t buflen)
{
  if (!res) return fail("null result");
  return copy_out(report_csv_row(res->res.report), buf, buflen);
}

const char* starsec_report_header(void)
{
  static const std::string header = report_csv_header();
  return header.c_str();
}

int starsec_result_trace_csv(const starsec_result* res, char* buf, size_t buflen)
{
  if (!res) return fail("null result");
  return copy_out(res->res.trace.to_csv(), buf, buflen);
}

const char* starsec_result_status(const starsec_result* res)
{
  return res ? run_status_name(res->res.status) : "null";
}

void starsec_result_free(starsec_result* res) { delete res; }

int starsec_sweep(const starsec_config* cfg, const char* param, const double* values,
                  size_t n_values, const char* baselines, int trials, uint64_t seed, int timing,
                  const char* csv_path, const char* svg_path_or_null)
{
  if (!cfg || !param || !values || !baselines || !csv_path) return fail("null argument");
  return guarded([&]() {
    SweepSpec spec;
    const auto p = parse_sweep_param(param);
    if (!p) return fail(std::string("unknown sweep param: ") + param);
    spec.param = *p;
    spec.values.assign(values, values + n_values);
    spec.baselines.clear();
    std::istringstream bs(baselines);
    std::string tok;
    while (std::getline(bs, tok, ',')) {
      const auto b = parse_baseline(tok);
      if (!b) return fail("unknown baseline: " + tok);
      spec.baselines.push_back(*b);
    }
    spec.trials = trials;
    spec.master_seed = seed;
    spec.timing = timing != 0;

    const SweepResult result = run_sweep(spec, cfg->cfg);

    std::ofstream csv(csv_path);
    if (!csv) return fail(std::string("cannot open for writing: ") + csv_path);
    emit_csv(result, csv);
    if (!csv.flush()) return fail(std::string("write failed: ") + csv_path);

    if (svg_path_or_null) {
      std::ofstream svg(svg_path_or_null);
      if (!svg) return fail(std::string("cannot open for writing: ") + svg_path_or_null);
      emit_plot_svg(result, svg);
      if (!svg.flush()) return fail(std::string("write failed: ") + svg_path_or_null);
    }

    for (const SweepCell& c : result.cells)
      if (c.used == 0)
        return fail("sweep cell with no feasible trial (baseline " +
                        std::string(baseline_name(c.baseline)) + ")",
                    STARSEC_INFEASIBLE);
    return STARSEC_OK;
  });
}

int starsec_sweep_file(const starsec_config* cfg, const char* spec_path, const char* csv_path,
                       const char* svg_path_or_null)
{
  if (!cfg || !spec_path || !csv_path) return fail("null argument");
  return guarded([&]() {
    std::ifstream f(spec_path);
    if (!f) return fail(std::string("cannot open sweep spec: ") + spec_path);
    std::ostringstream buf;
    buf << f.rdbuf();
    std::vector<std::string> errors;
    const SweepSpec spec = parse_sweep_spec_text(buf.str(), &errors);
    if (!errors.empty()) return fail(errors.front());

    const SweepResult result = run_sweep(spec, cfg->cfg);
    std::ofstream csv(csv_path);
    if (!csv) return fail(std::string("cannot open for writing: ") + csv_path);
    emit_csv(result, csv);
    if (!csv.flush()) return fail(std::string("write failed: ") + csv_path);
    if (svg_path_or_null) {
      std::ofstream svg(svg_path_or_null);
      if (!svg) return fail(std::string("cannot open for writing: ") + svg_path_or_null);
      emit_plot_svg(result, svg);
    }
    for (const SweepCell& c : result.cells)
      if (c.used == 0) return fail("sweep cell with no feasible trial", STARSEC_INFEASIBLE);
    return STARSEC_OK;
  });
}

int starsec_verify_sop(int instances, int64_t samples, uint64_t seed, char* buf, size_t buflen)
{
  return guarded([&]() {
    const SopVerifyReport rep = verify_sop(instances, samples, seed);
    if (buf && buflen) copy_out(sop_report_text(rep), buf, buflen);
    return rep.all_pass ? STARSEC_OK : fail("closed form / Monte Carlo disagreement");
  });
}

int starsec_oracle_ssr(const starsec_config* cfg, const starsec_channels* ch,
                       const char* protocol, double* out)
{
  if (!cfg || !ch || !protocol || !out) return fail("null argument");
  return guarded([&]() {
    const std::string p(protocol);
    if (p != "es" && p != "ms") return fail("protocol must be es or ms");
    const OracleResult r =
        oracle_search(cfg->cfg, ch->ch, p == "es" ? Protocol::es : Protocol::ms);
    *out = r.best_ssr;
    return r.feasible ? STARSEC_OK : fail("no feasible oracle point", STARSEC_INFEASIBLE);
  });
}

}  // extern "C"
