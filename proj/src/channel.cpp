#include "channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rng.hpp"

namespace starsec {

namespace {

// Stream tags for the per-link sub-seeds. Appending new links must not
// disturb existing draws, so each link owns a fixed tag.
enum : std::uint64_t {
  kTagH = 1,
  kTagBobT = 2,
  kTagBobR = 3,
  kTagEveT = 4,
  kTagEveR = 5,
  kTagEveDistT = 6,
  kTagEveDistR = 7,
};

CVec draw_cvec(Rng& rng, int n, double scale)
{
  CVec out(n);
  for (int i = 0; i < n; ++i) out[i] = scale * rng.cnormal();
  return out;
}

}  // namespace

double path_gain(double d, const SystemConfig& cfg, std::vector<std::string>* warnings)
{
  if (d <= cfg.eve_dist_floor) {
    if (warnings) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "path_gain: distance %.6g clamped to floor %.6g", d,
                    cfg.eve_dist_floor);
      warnings->push_back(buf);
    }
    d = cfg.eve_dist_floor;
  }
  return cfg.reference_gain * std::pow(d, -cfg.pathloss_exponent);
}

ChannelSet ChannelSet::from_links(CMat H, CVec h_t, CVec h_r, CVec v_t, CVec v_r,
                                  double eve_gain_t, double eve_gain_r)
{
  const auto m = H.rows();
  if (h_t.size() != m || h_r.size() != m || v_t.size() != m || v_r.size() != m)
    throw std::invalid_argument("from_links: link dimensions disagree");
  ChannelSet ch;
  ch.F_t = h_t.conjugate().asDiagonal() * H;
  ch.F_r = h_r.conjugate().asDiagonal() * H;
  ch.V_t = v_t.conjugate().asDiagonal() * H;
  ch.V_r = v_r.conjugate().asDiagonal() * H;
  ch.H = std::move(H);
  ch.h_t = std::move(h_t);
  ch.h_r = std::move(h_r);
  ch.v_t = std::move(v_t);
  ch.v_r = std::move(v_r);
  ch.eve_gain_t = eve_gain_t;
  ch.eve_gain_r = eve_gain_r;
  return ch;
}

ChannelSet generate_channels(const SystemConfig& cfg, std::uint64_t seed,
                             std::vector<std::string>* warnings)
{
  const int m = cfg.num_elements;
  const int nt = cfg.num_antennas;

  const double gain_h = path_gain(cfg.d_bs_ris, cfg, warnings);
  const double gain_bob = path_gain(cfg.d_ris_bob, cfg, warnings);

  auto draw_eve_dist = [&](std::uint64_t tag) {
    Rng rng(sub_seed(seed, tag));
    double d = rng.uniform(cfg.eve_dist_min, cfg.eve_dist_max);
    while (d < cfg.eve_dist_floor) d = rng.uniform(cfg.eve_dist_min, cfg.eve_dist_max);
    return d;
  };
  const double dist_et = draw_eve_dist(kTagEveDistT);
  const double dist_er = draw_eve_dist(kTagEveDistR);
  const double gain_et = path_gain(dist_et, cfg, warnings);
  const double gain_er = path_gain(dist_er, cfg, warnings);

  Rng rng_h(sub_seed(seed, kTagH));
  CMat H(m, nt);
  const double scale_h = std::sqrt(gain_h);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < nt; ++j) H(i, j) = scale_h * rng_h.cnormal();

  Rng rng_bt(sub_seed(seed, kTagBobT));
  Rng rng_br(sub_seed(seed, kTagBobR));
  Rng rng_et(sub_seed(seed, kTagEveT));
  Rng rng_er(sub_seed(seed, kTagEveR));
  CVec h_t = draw_cvec(rng_bt, m, std::sqrt(gain_bob));
  CVec h_r = draw_cvec(rng_br, m, std::sqrt(gain_bob));
  CVec v_t = draw_cvec(rng_et, m, std::sqrt(gain_et));
  CVec v_r = draw_cvec(rng_er, m, std::sqrt(gain_er));

  ChannelSet ch = ChannelSet::from_links(std::move(H), std::move(h_t), std::move(h_r),
                                         std::move(v_t), std::move(v_r), gain_et, gain_er);
  ch.eve_dist_t = dist_et;
  ch.eve_dist_r = dist_er;
  ch.seed = seed;
  return ch;
}

namespace {

void put_cvec(std::ostream& os, const char* name, const CVec& v)
{
  os << name << " " << v.size() << "\n";
  char buf[96];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v[i].real(), v[i].imag());
    os << buf;
  }
}

void put_cmat(std::ostream& os, const char* name, const CMat& a)
{
  os << name << " " << a.rows() << " " << a.cols() << "\n";
  char buf[96];
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", a(i, j).real(), a(i, j).imag());
      os << buf;
    }
}

cxd get_entry(std::istream& is)
{
  double re, im;
  if (!(is >> re >> im)) throw std::runtime_error("channel dump: truncated entry list");
  return {re, im};
}

CVec get_cvec(std::istream& is, const char* name)
{
  std::string tag;
  Eigen::Index n;
  if (!(is >> tag >> n) || tag != name)
    throw std::runtime_error(std::string("channel dump: expected block ") + name);
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = get_entry(is);
  return v;
}

CMat get_cmat(std::istream& is, const char* name)
{
  std::string tag;
  Eigen::Index r, c;
  if (!(is >> tag >> r >> c) || tag != name)
    throw std::runtime_error(std::string("channel dump: expected block ") + name);
  CMat a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = get_entry(is);
  return a;
}

}  // namespace

void save_channels(const ChannelSet& ch, std::ostream& os)
{
  os << "starsec-channels v1\n";
  os << "seed " << ch.seed << "\n";
  os << "dims " << ch.elements() << " " << ch.antennas() << "\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "eve_gain %.17g %.17g\neve_dist %.17g %.17g\n", ch.eve_gain_t,
                ch.eve_gain_r, ch.eve_dist_t, ch.eve_dist_r);
  os << buf;
  put_cmat(os, "H", ch.H);
  put_cvec(os, "h_t", ch.h_t);
  put_cvec(os, "h_r", ch.h_r);
  put_cvec(os, "v_t", ch.v_t);
  put_cvec(os, "v_r", ch.v_r);
}

void save_channels_file(const ChannelSet& ch, const std::string& path)
{
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  save_channels(ch, f);
  if (!f) throw std::runtime_error("write failed: " + path);
}

ChannelSet load_channels(std::istream& is)
{
  std::string magic, version, tag;
  if (!(is >> magic >> version) || magic != "starsec-channels" || version != "v1")
    throw std::runtime_error("channel dump: bad header");
  std::uint64_t seed;
  Eigen::Index m, nt;
  if (!(is >> tag >> seed) || tag != "seed") throw std::runtime_error("channel dump: missing seed");
  if (!(is >> tag >> m >> nt) || tag != "dims")
    throw std::runtime_error("channel dump: missing dims");
  double eg_t, eg_r, ed_t, ed_r;
  if (!(is >> tag >> eg_t >> eg_r) || tag != "eve_gain")
    throw std::runtime_error("channel dump: missing eve_gain");
  if (!(is >> tag >> ed_t >> ed_r) || tag != "eve_dist")
    throw std::runtime_error("channel dump: missing eve_dist");

  CMat H = get_cmat(is, "H");
  CVec h_t = get_cvec(is, "h_t");
  CVec h_r = get_cvec(is, "h_r");
  CVec v_t = get_cvec(is, "v_t");
  CVec v_r = get_cvec(is, "v_r");
  if (H.rows() != m || H.cols() != nt) throw std::runtime_error("channel dump: dims mismatch");

  ChannelSet ch = ChannelSet::from_links(std::move(H), std::move(h_t), std::move(h_r),
                                         std::move(v_t), std::move(v_r), eg_t, eg_r);
  ch.eve_dist_t = ed_t;
  ch.eve_dist_r = ed_r;
  ch.seed = seed;
  return ch;
}

ChannelSet load_channels_file(const std::string& path)
{
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open channel dump: " + path);
  return load_channels(f);
}

}  // namespace starsec
