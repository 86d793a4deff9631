#include "baselines.hpp"

#include <stdexcept>

namespace starsec {

std::optional<BaselineKind> parse_baseline(const std::string& name)
{
  for (BaselineKind b : {BaselineKind::es_ipcsi, BaselineKind::ms_ipcsi, BaselineKind::ris_ipcsi,
                         BaselineKind::es_pcsi, BaselineKind::ms_pcsi}) {
    if (name == baseline_name(b)) return b;
  }
  return std::nullopt;
}

RunResult run_conventional_ris(const SystemConfig& cfg, const ChannelSet& ch,
                               const std::optional<Initialization>& init)
{
  const int m = ch.elements();
  if (m % 2 != 0)
    throw std::invalid_argument(
        "conventional RIS baseline needs an even element count (half transmit, half reflect)");
  RVec pattern = RVec::Zero(m);
  pattern.head(m / 2).setOnes();  // elements 1..M/2 transmit-only

  RunOptions opt;
  opt.protocol = Protocol::es;
  opt.frozen_kappa_t = pattern;
  return run_ao(cfg, ch, opt, init);
}

RunResult run_pcsi(const SystemConfig& cfg, const ChannelSet& ch, Protocol proto,
                   const std::optional<Initialization>& init)
{
  RunOptions opt;
  opt.protocol = proto;
  opt.eve_model = EveModel::instantaneous;
  return run_ao(cfg, ch, opt, init);
}

RunResult run_baseline(BaselineKind kind, const SystemConfig& cfg, const ChannelSet& ch)
{
  switch (kind) {
    case BaselineKind::es_ipcsi: return run_es(cfg, ch);
    case BaselineKind::ms_ipcsi: return run_ms(cfg, ch);
    case BaselineKind::ris_ipcsi: return run_conventional_ris(cfg, ch);
    case BaselineKind::es_pcsi: return run_pcsi(cfg, ch, Protocol::es);
    case BaselineKind::ms_pcsi: return run_pcsi(cfg, ch, Protocol::ms);
  }
  throw std::logic_error("unknown baseline");
}

}  // namespace starsec
