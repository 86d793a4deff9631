#pragma once

#include <optional>
#include <string>

#include "optimizer.hpp"

namespace starsec {

/// The five comparison schemes: the two STAR protocols under statistical
/// Eve CSI, the side-by-side conventional dual-RIS, and the two protocols
/// under perfect Eve CSI.
enum class BaselineKind { es_ipcsi, ms_ipcsi, ris_ipcsi, es_pcsi, ms_pcsi };

constexpr const char* baseline_name(BaselineKind b)
{
  switch (b) {
    case BaselineKind::es_ipcsi: return "es-ipcsi";
    case BaselineKind::ms_ipcsi: return "ms-ipcsi";
    case BaselineKind::ris_ipcsi: return "ris-ipcsi";
    case BaselineKind::es_pcsi: return "es-pcsi";
    case BaselineKind::ms_pcsi: return "ms-pcsi";
  }
  return "?";
}

std::optional<BaselineKind> parse_baseline(const std::string& name);

/// Conventional dual-RIS comparison: the first half of the surface is a
/// transmit-only RIS, the second half reflect-only. Amplitudes are frozen
/// to that 0/1 pattern; phases and beamformers are optimized with the same
/// machinery and constraint set. Requires even element count.
RunResult run_conventional_ris(const SystemConfig& cfg, const ChannelSet& ch,
                               const std::optional<Initialization>& init = std::nullopt);

/// Perfect-CSI variant of either protocol: the instantaneous Eve rate
/// replaces the redundancy-rate term and no outage machinery is used;
/// the energy constraint is unchanged.
RunResult run_pcsi(const SystemConfig& cfg, const ChannelSet& ch, Protocol proto,
                   const std::optional<Initialization>& init = std::nullopt);

RunResult run_baseline(BaselineKind kind, const SystemConfig& cfg, const ChannelSet& ch);

}  // namespace starsec
