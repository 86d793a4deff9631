#include "sweep.hpp"

#include <atomic>
#include <bit>
#include <chrono>
#include <mutex>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "channel.hpp"
#include "rng.hpp"

namespace starsec {

const char* sweep_param_name(SweepParam p)
{
  switch (p) {
    case SweepParam::elements: return "M";
    case SweepParam::antennas: return "N_t";
    case SweepParam::e_min_db: return "E_min_db";
    case SweepParam::p_max_dbw: return "P_max_dbw";
    case SweepParam::delta: return "delta";
  }
  return "?";
}

std::optional<SweepParam> parse_sweep_param(const std::string& name)
{
  if (name == "m" || name == "M" || name == "elements") return SweepParam::elements;
  if (name == "n-t" || name == "nt" || name == "N_t" || name == "antennas")
    return SweepParam::antennas;
  if (name == "e-min-db" || name == "E_min_db") return SweepParam::e_min_db;
  if (name == "p-max-dbw" || name == "P_max_dbw") return SweepParam::p_max_dbw;
  if (name == "delta") return SweepParam::delta;
  return std::nullopt;
}

SystemConfig apply_sweep_value(const SystemConfig& base, SweepParam param, double value)
{
  SystemConfig cfg = base;
  switch (param) {
    case SweepParam::elements: cfg.num_elements = static_cast<int>(value); break;
    case SweepParam::antennas: cfg.num_antennas = static_cast<int>(value); break;
    case SweepParam::e_min_db: cfg.e_min = db_to_linear(value); break;
    case SweepParam::p_max_dbw: cfg.p_max = db_to_linear(value); break;
    case SweepParam::delta: cfg.sop_bound = value; break;
  }
  return cfg;
}

std::uint64_t trial_seed(std::uint64_t master, BaselineKind baseline, double value, int trial)
{
  std::uint64_t s = sub_seed(master, 0xBA5EULL + static_cast<std::uint64_t>(baseline));
  s = sub_seed(s, std::bit_cast<std::uint64_t>(value));
  return sub_seed(s, static_cast<std::uint64_t>(trial) + 1);
}

namespace {

struct TrialOutcome {
  bool excluded = false;
  bool converged = false;
  double ssr = 0.0;
  double energy_t = 0.0;
  double energy_r = 0.0;
  double iters = 0.0;
  double ms = 0.0;
};

int resolve_workers(int requested)
{
  if (requested > 0) return requested;
  if (const char* env = std::getenv("STARSEC_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 2;
}

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, const SystemConfig& base)
{
  if (spec.values.empty()) throw std::invalid_argument("sweep: empty value list");
  if (spec.trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");

  SystemConfig cfg0 = base;
  for (const auto& [k, v] : spec.overrides) {
    std::string err;
    if (!apply_config_entry(cfg0, k, v, &err)) throw std::invalid_argument("sweep override: " + err);
  }

  struct Task {
    BaselineKind baseline;
    double value;
    int trial;
  };
  std::vector<Task> tasks;
  for (BaselineKind b : spec.baselines)
    for (double v : spec.values)
      for (int t = 0; t < spec.trials; ++t) tasks.push_back({b, v, t});

  std::vector<TrialOutcome> outcomes(tasks.size());
  std::atomic<size_t> next{0};
  std::mutex err_mutex;
  std::string first_error;

  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      TrialOutcome& out = outcomes[i];
      try {
        const SystemConfig cfg = apply_sweep_value(cfg0, spec.param, task.value);
        const std::uint64_t seed =
            trial_seed(spec.master_seed, task.baseline, task.value, task.trial);
        const auto t0 = std::chrono::steady_clock::now();
        const ChannelSet ch = generate_channels(cfg, seed);
        const RunResult res = run_baseline(task.baseline, cfg, ch);
        out.ms = spec.timing ? std::chrono::duration<double, std::milli>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count()
                             : 0.0;
        if (res.status == RunStatus::infeasible) {
          out.excluded = true;
          continue;
        }
        out.converged = res.status == RunStatus::converged;
        out.ssr = res.report.ssr_outage;
        out.energy_t = res.report.energy.t;
        out.energy_r = res.report.energy.r;
        out.iters = res.iterations;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (first_error.empty())
          first_error = std::string(e.what()) + " (baseline " +
                        baseline_name(task.baseline) + ", value " + fmt(task.value) +
                        ", trial " + std::to_string(task.trial) + ")";
      }
    }
  };

  const int nworkers = std::min<std::size_t>(resolve_workers(spec.workers), tasks.size());
  std::vector<std::thread> threads;
  for (int t = 0; t < nworkers - 1; ++t) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  if (!first_error.empty()) throw std::runtime_error("sweep trial failed: " + first_error);

  SweepResult result;
  result.param = spec.param;
  size_t idx = 0;
  for (BaselineKind b : spec.baselines) {
    for (double v : spec.values) {
      SweepCell cell;
      cell.baseline = b;
      cell.value = v;
      std::vector<double>& ssrs = cell.trial_ssrs;
      for (int t = 0; t < spec.trials; ++t, ++idx) {
        const TrialOutcome& o = outcomes[idx];
        if (o.excluded) {
          ++cell.excluded;
          continue;
        }
        ++cell.used;
        ssrs.push_back(o.ssr);
        cell.mean_ssr += o.ssr;
        cell.mean_energy_t += o.energy_t;
        cell.mean_energy_r += o.energy_r;
        cell.converged_frac += o.converged ? 1.0 : 0.0;
        cell.mean_iters += o.iters;
        cell.mean_ms += o.ms;
      }
      if (cell.used > 0) {
        const double n = cell.used;
        cell.mean_ssr /= n;
        cell.mean_energy_t /= n;
        cell.mean_energy_r /= n;
        cell.converged_frac /= n;
        cell.mean_iters /= n;
        cell.mean_ms /= n;
        if (cell.used > 1) {
          double ss = 0.0;
          for (double s : ssrs) ss += (s - cell.mean_ssr) * (s - cell.mean_ssr);
          cell.stderr_ssr = std::sqrt(ss / (n - 1.0) / n);
        }
      }
      result.cells.push_back(cell);
    }
  }
  return result;
}

void emit_csv(const SweepResult& result, std::ostream& os)
{
  os << "baseline,sweep_param,sweep_value,mean_ssr,stderr_ssr,mean_energy_t,mean_energy_r,"
        "converged_frac,mean_iters,mean_ms,excluded\n";
  for (const SweepCell& c : result.cells) {
    os << baseline_name(c.baseline) << ',' << sweep_param_name(result.param) << ','
       << fmt(c.value) << ',' << fmt(c.mean_ssr) << ',' << fmt(c.stderr_ssr) << ','
       << fmt(c.mean_energy_t) << ',' << fmt(c.mean_energy_r) << ',' << fmt(c.converged_frac)
       << ',' << fmt(c.mean_iters) << ',' << fmt(c.mean_ms) << ',' << c.excluded << '\n';
  }
}

std::string sweep_csv(const SweepResult& result)
{
  std::ostringstream os;
  emit_csv(result, os);
  return os.str();
}

SweepResult parse_sweep_csv(std::istream& is)
{
  SweepResult result;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("sweep csv: empty file");
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> parts;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) parts.push_back(field);
    if (parts.size() != 11) throw std::runtime_error("sweep csv: bad row: " + line);
    SweepCell c;
    const auto b = parse_baseline(parts[0]);
    if (!b) throw std::runtime_error("sweep csv: unknown baseline " + parts[0]);
    c.baseline = *b;
    if (first) {
      for (SweepParam p : {SweepParam::elements, SweepParam::antennas, SweepParam::e_min_db,
                           SweepParam::p_max_dbw, SweepParam::delta})
        if (parts[1] == sweep_param_name(p)) result.param = p;
      first = false;
    }
    c.value = std::stod(parts[2]);
    c.mean_ssr = std::stod(parts[3]);
    c.stderr_ssr = std::stod(parts[4]);
    c.mean_energy_t = std::stod(parts[5]);
    c.mean_energy_r = std::stod(parts[6]);
    c.converged_frac = std::stod(parts[7]);
    c.mean_iters = std::stod(parts[8]);
    c.mean_ms = std::stod(parts[9]);
    c.excluded = std::stoi(parts[10]);
    result.cells.push_back(c);
  }
  return result;
}

namespace {

const char* axis_label(SweepParam p)
{
  switch (p) {
    case SweepParam::elements: return "STAR-RIS elements M (count)";
    case SweepParam::antennas: return "transmit antennas N_t (count)";
    case SweepParam::e_min_db: return "minimum harvested energy E_min (dB)";
    case SweepParam::p_max_dbw: return "power budget P_max (dBW)";
    case SweepParam::delta: return "SOP bound delta";
  }
  return "";
}

const char* series_color(int i)
{
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b"};
  return palette[i % 6];
}

}  // namespace

void emit_plot_svg(const SweepResult& result, std::ostream& os)
{
  if (result.cells.empty()) throw std::invalid_argument("emit_plot_svg: empty result");

  constexpr double W = 800, H = 560, ML = 80, MR = 180, MT = 40, MB = 70;
  double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
  for (const SweepCell& c : result.cells) {
    xmin = std::min(xmin, c.value);
    xmax = std::max(xmax, c.value);
    ymax = std::max(ymax, c.mean_ssr + c.stderr_ssr);
  }
  if (xmax <= xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax <= ymin) ymax = 1.0;
  ymax *= 1.08;

  auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << " " << H
     << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

  // axes + ticks
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
     << H - MB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB
     << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - MB + 20
       << "\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    os << "<text x=\"" << ML - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << buf
       << "</text>\n";
    os << "<line x1=\"" << px(xv) << "\" y1=\"" << H - MB << "\" x2=\"" << px(xv) << "\" y2=\""
       << H - MB + 5 << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ML - 5 << "\" y1=\"" << py(yv) << "\" x2=\"" << ML << "\" y2=\""
       << py(yv) << "\" stroke=\"black\"/>\n";
  }
  os << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 20
     << "\" text-anchor=\"middle\">" << axis_label(result.param) << "</text>\n";
  os << "<text x=\"20\" y=\"" << (MT + H - MB) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << (MT + H - MB) / 2
     << ")\">mean SSR (bits/s/Hz)</text>\n";

  // series, grouped by baseline in first-appearance order
  std::vector<BaselineKind> series;
  for (const SweepCell& c : result.cells)
    if (std::find(series.begin(), series.end(), c.baseline) == series.end())
      series.push_back(c.baseline);

  int si = 0;
  for (BaselineKind b : series) {
    const char* color = series_color(si);
    std::ostringstream pts;
    for (const SweepCell& c : result.cells) {
      if (c.baseline != b) continue;
      const double x = px(c.value), y = py(c.mean_ssr);
      pts << x << "," << y << " ";
      os << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"3.5\" fill=\"" << color
         << "\"/>\n";
      const double e = c.stderr_ssr;
      if (e > 0) {
        os << "<line x1=\"" << x << "\" y1=\"" << py(c.mean_ssr - e) << "\" x2=\"" << x
           << "\" y2=\"" << py(c.mean_ssr + e) << "\" stroke=\"" << color << "\"/>\n";
        os << "<line x1=\"" << x - 4 << "\" y1=\"" << py(c.mean_ssr - e) << "\" x2=\"" << x + 4
           << "\" y2=\"" << py(c.mean_ssr - e) << "\" stroke=\"" << color << "\"/>\n";
        os << "<line x1=\"" << x - 4 << "\" y1=\"" << py(c.mean_ssr + e) << "\" x2=\"" << x + 4
           << "\" y2=\"" << py(c.mean_ssr + e) << "\" stroke=\"" << color << "\"/>\n";
      }
    }
    os << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.8\"/>\n";
    const double ly = MT + 22.0 * si;
    os << "<line x1=\"" << W - MR + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - MR + 40
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - MR + 46 << "\" y=\"" << ly + 4 << "\">" << baseline_name(b)
       << "</text>\n";
    ++si;
  }
  os << "</svg>\n";
}

SweepSpec parse_sweep_spec_text(const std::string& text, std::vector<std::string>* errors)
{
  SweepSpec spec;
  std::istringstream is(text);
  std::string line;
  auto err = [&](const std::string& m) {
    if (errors) errors->push_back(m);
  };
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (eq == std::string::npos) {
      err("sweep spec: expected key = value: " + line);
      continue;
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r\n");
      const auto b = s.find_last_not_of(" \t\r\n");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key == "param") {
      const auto p = parse_sweep_param(value);
      if (!p) err("sweep spec: unknown param " + value);
      else spec.param = *p;
    } else if (key == "values") {
      spec.values.clear();
      std::istringstream vs(value);
      std::string tok;
      while (std::getline(vs, tok, ',')) spec.values.push_back(std::stod(tok));
    } else if (key == "baselines") {
      spec.baselines.clear();
      std::istringstream vs(value);
      std::string tok;
      while (std::getline(vs, tok, ',')) {
        const auto b = parse_baseline(strip(tok));
        if (!b) err("sweep spec: unknown baseline " + tok);
        else spec.baselines.push_back(*b);
      }
    } else if (key == "trials") {
      spec.trials = std::stoi(value);
    } else if (key == "seed") {
      spec.master_seed = std::stoull(value);
    } else if (key == "timing") {
      spec.timing = value == "1" || value == "true";
    } else if (key == "workers") {
      spec.workers = std::stoi(value);
    } else if (key.rfind("override.", 0) == 0) {
      spec.overrides.emplace_back(key.substr(9), value);
    } else {
      err("sweep spec: unknown key " + key);
    }
  }
  return spec;
}

}  // namespace starsec
