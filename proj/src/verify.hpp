#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"

namespace starsec {

struct SopVerifyRow {
  int index = 0;
  int m = 0;
  int nt = 0;
  double s_k = 0.0;
  double closed_form = 0.0;
  double monte_carlo = 0.0;
  double std_error = 0.0;
  double diff = 0.0;
  double bound = 0.0;  // 3 * stderr + 0.005
  bool pass = false;
};

struct SopVerifyReport {
  std::vector<SopVerifyRow> rows;
  bool all_pass = false;
  double worst_margin = 0.0;  // max(diff - bound)
};

/// Closed-form SOP against the sampling oracle on random full-pipeline
/// instances (random channels, TaRCs, beamformers, redundancy rates).
SopVerifyReport verify_sop(int instances, std::int64_t samples, std::uint64_t seed);

std::string sop_report_text(const SopVerifyReport& rep);

}  // namespace starsec
