#include <doctest.h>

#include <cmath>

#include "baselines.hpp"
#include "instances.hpp"

using namespace starsec;
using namespace starsec::testing;

namespace {

SystemConfig tiny_cfg(int m = 2, int nt = 2)
{
  SystemConfig cfg;
  cfg.num_elements = m;
  cfg.num_antennas = nt;
  cfg.reference_gain = 1.0;
  cfg.d_bs_ris = cfg.d_ris_bob = 1.0;
  cfg.eve_dist_min = 0.5;
  cfg.eve_dist_max = 2.0;
  cfg.e_min = 0.0;
  cfg.max_iters = 12;
  return cfg;
}

}  // namespace

TEST_CASE("baseline names round-trip")
{
  for (BaselineKind b : {BaselineKind::es_ipcsi, BaselineKind::ms_ipcsi, BaselineKind::ris_ipcsi,
                         BaselineKind::es_pcsi, BaselineKind::ms_pcsi}) {
    const auto parsed = parse_baseline(baseline_name(b));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == b);
  }
  CHECK_FALSE(parse_baseline("es").has_value());
}

TEST_CASE("conventional RIS rejects odd element counts")
{
  const SystemConfig cfg = tiny_cfg(3, 2);
  const ChannelSet ch = generate_channels(cfg, 1);
  CHECK_THROWS_AS((void)run_conventional_ris(cfg, ch), std::invalid_argument);
}

TEST_CASE("conventional RIS freezes the half/half pattern")
{
  const SystemConfig cfg = tiny_cfg(4, 2);
  const ChannelSet ch = generate_channels(cfg, 2);
  const RunResult res = run_conventional_ris(cfg, ch);
  REQUIRE(res.status != RunStatus::infeasible);
  const RVec at = res.theta.amplitudes(Region::transmit);
  const RVec ar = res.theta.amplitudes(Region::reflect);
  for (int i = 0; i < 4; ++i) {
    const double want_t = i < 2 ? 1.0 : 0.0;
    CHECK(at[i] == doctest::Approx(want_t));
    CHECK(ar[i] == doctest::Approx(1.0 - want_t));
  }
}

TEST_CASE("two-element conventional RIS is the fixed one-per-region split")
{
  const SystemConfig cfg = tiny_cfg(2, 2);
  const ChannelSet ch = generate_channels(cfg, 3);
  const RunResult res = run_conventional_ris(cfg, ch);
  REQUIRE(res.status != RunStatus::infeasible);
  CHECK(res.theta.amplitudes(Region::transmit)[0] == doctest::Approx(1.0));
  CHECK(res.theta.amplitudes(Region::transmit)[1] == doctest::Approx(0.0));
  CHECK(res.theta.binarity_residual() == doctest::Approx(0.0));
}

TEST_CASE("perfect-CSI runs never touch the outage machinery")
{
  const SystemConfig cfg = tiny_cfg(2, 2);
  const ChannelSet ch = generate_channels(cfg, 4);
  const RunResult res = run_pcsi(cfg, ch, Protocol::es);
  REQUIRE(res.status != RunStatus::infeasible);
  CHECK_FALSE(res.used_sop);
}

TEST_CASE("perfect CSI without an eavesdropper channel maximizes the sum rate")
{
  const SystemConfig cfg = tiny_cfg(3, 2);
  const ChannelSet raw = generate_channels(cfg, 5);
  ChannelSet ch = ChannelSet::from_links(raw.H, raw.h_t, raw.h_r, CVec::Zero(3), CVec::Zero(3),
                                         raw.eve_gain_t, raw.eve_gain_r);
  ch.seed = raw.seed;
  const RunResult res = run_pcsi(cfg, ch, Protocol::es);
  REQUIRE(res.status != RunStatus::infeasible);
  double sum_rate = 0.0;
  for (Region k : both_regions)
    sum_rate += std::log2(1.0 + sinr_bob(ch, res.theta, res.w, k, cfg));
  CHECK(res.report.ssr_pcsi == doctest::Approx(sum_rate).epsilon(1e-9));
}

TEST_CASE("perfect-CSI solutions are also scored on the outage metric")
{
  const SystemConfig cfg = tiny_cfg(2, 2);
  const ChannelSet ch = generate_channels(cfg, 6);
  const RunResult res = run_pcsi(cfg, ch, Protocol::ms);
  REQUIRE(res.status != RunStatus::infeasible);
  // the report carries both metrics; the outage score recomputes exactly
  CHECK(res.report.ssr_outage ==
        doctest::Approx(ssr(ch, res.theta, res.w, cfg.sop_bound, cfg)).epsilon(1e-12));
}

TEST_CASE("frozen-pattern runs stay within the ES feasible set's value")
{
  // paired channels: the conventional RIS can never beat ES by more than
  // the stopping granularity when both converge
  int violations = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const SystemConfig cfg = tiny_cfg(4, 2);
    const ChannelSet ch = generate_channels(cfg, 60 + seed);
    const RunResult es = run_es(cfg, ch);
    const RunResult ris = run_conventional_ris(cfg, ch);
    if (es.status == RunStatus::converged && ris.status == RunStatus::converged) {
      if (ris.report.ssr_outage > es.report.ssr_outage + 10.0 * cfg.tolerance) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("dispatcher covers every baseline")
{
  const SystemConfig cfg = tiny_cfg(2, 2);
  const ChannelSet ch = generate_channels(cfg, 7);
  for (BaselineKind b : {BaselineKind::es_ipcsi, BaselineKind::ms_ipcsi, BaselineKind::ris_ipcsi,
                         BaselineKind::es_pcsi, BaselineKind::ms_pcsi}) {
    const RunResult res = run_baseline(b, cfg, ch);
    CHECK(res.status != RunStatus::infeasible);
    CHECK(res.report.ssr_outage >= 0.0);
  }
}
