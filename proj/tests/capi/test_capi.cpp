// Exercises the shared-library surface end to end: config handling,
// channel round trips, runs, sweeps and the verification helpers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "starsec.h"

namespace {

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name) : path("/tmp/starsec_capi_" + name) {}
  ~TempPath() { std::remove(path.c_str()); }
};

struct Cfg {
  starsec_config* ptr = starsec_config_create();
  ~Cfg() { starsec_config_free(ptr); }
};

void make_tiny(starsec_config* cfg)
{
  REQUIRE(starsec_config_set(cfg, "num_elements", "2") == STARSEC_OK);
  REQUIRE(starsec_config_set(cfg, "num_antennas", "2") == STARSEC_OK);
  REQUIRE(starsec_config_set(cfg, "reference_gain", "1") == STARSEC_OK);
  REQUIRE(starsec_config_set(cfg, "d_bs_ris", "1") == STARSEC_OK);
  REQUIRE(starsec_config_set(cfg, "d_ris_bob", "1") == STARSEC_OK);
  REQUIRE(starsec_config_set(cfg, "e_min", "0") == STARSEC_OK);
  REQUIRE(starsec_config_set(cfg, "max_iters", "8") == STARSEC_OK);
}

}  // namespace

TEST_CASE("version and error text are always available")
{
  CHECK(std::string(starsec_version()).find('.') != std::string::npos);
  CHECK(starsec_last_error() != nullptr);
}

TEST_CASE("config set, dump, validate")
{
  Cfg cfg;
  REQUIRE(cfg.ptr != nullptr);
  CHECK(starsec_config_set(cfg.ptr, "num_elements", "16") == STARSEC_OK);
  CHECK(starsec_config_set(cfg.ptr, "not_a_key", "1") == STARSEC_ERROR);
  CHECK(std::string(starsec_last_error()).find("unknown config key") != std::string::npos);

  char buf[8192];
  REQUIRE(starsec_config_dump(cfg.ptr, buf, sizeof buf) == STARSEC_OK);
  CHECK(std::string(buf).find("num_elements = 16") != std::string::npos);

  CHECK(starsec_config_validate(cfg.ptr, buf, sizeof buf) == STARSEC_OK);
  CHECK(starsec_config_set(cfg.ptr, "sop_bound", "1.5") == STARSEC_OK);
  CHECK(starsec_config_validate(cfg.ptr, buf, sizeof buf) == STARSEC_ERROR);
  CHECK(std::string(buf).find("sop_bound") != std::string::npos);
}

TEST_CASE("config file load")
{
  TempPath tmp("cfg.txt");
  {
    std::ofstream f(tmp.path);
    f << "num_elements = 6\nsop_bound = 0.25\n";
  }
  Cfg cfg;
  REQUIRE(starsec_config_load(cfg.ptr, tmp.path.c_str()) == STARSEC_OK);
  char buf[8192];
  REQUIRE(starsec_config_dump(cfg.ptr, buf, sizeof buf) == STARSEC_OK);
  CHECK(std::string(buf).find("num_elements = 6") != std::string::npos);
  CHECK(starsec_config_load(cfg.ptr, "/nonexistent/path") == STARSEC_ERROR);
}

TEST_CASE("channel generate, save, load")
{
  Cfg cfg;
  make_tiny(cfg.ptr);
  starsec_channels* ch = nullptr;
  REQUIRE(starsec_channels_generate(cfg.ptr, 7, &ch) == STARSEC_OK);
  TempPath tmp("channels.txt");
  REQUIRE(starsec_channels_save(ch, tmp.path.c_str()) == STARSEC_OK);

  starsec_channels* back = nullptr;
  REQUIRE(starsec_channels_load(tmp.path.c_str(), &back) == STARSEC_OK);
  starsec_channels_free(ch);
  starsec_channels_free(back);
}

TEST_CASE("run produces metrics, report and trace")
{
  Cfg cfg;
  make_tiny(cfg.ptr);
  starsec_channels* ch = nullptr;
  REQUIRE(starsec_channels_generate(cfg.ptr, 3, &ch) == STARSEC_OK);
  std::unique_ptr<starsec_channels, decltype(&starsec_channels_free)> guard(
      ch, starsec_channels_free);

  starsec_result* res = nullptr;
  REQUIRE(starsec_run(cfg.ptr, ch, "es-ipcsi", &res) == STARSEC_OK);
  std::unique_ptr<starsec_result, decltype(&starsec_result_free)> rguard(res,
                                                                         starsec_result_free);

  double ssr = -1, used_sop = -1;
  REQUIRE(starsec_result_metric(res, "ssr", &ssr) == STARSEC_OK);
  REQUIRE(starsec_result_metric(res, "used_sop", &used_sop) == STARSEC_OK);
  CHECK(ssr >= 0.0);
  CHECK(used_sop == 1.0);
  CHECK(starsec_result_metric(res, "nope", &ssr) == STARSEC_ERROR);

  char buf[1 << 16];
  REQUIRE(starsec_result_report_csv(res, buf, sizeof buf) == STARSEC_OK);
  CHECK(std::string(starsec_report_header()).find("ssr") != std::string::npos);
  REQUIRE(starsec_result_trace_csv(res, buf, sizeof buf) == STARSEC_OK);
  CHECK(std::string(buf).find("iteration,") == 0);
  CHECK(std::string(starsec_result_status(res)) != "infeasible");

  CHECK(starsec_run(cfg.ptr, ch, "not-a-baseline", &res) == STARSEC_ERROR);
}

TEST_CASE("infeasible instances surface as STARSEC_INFEASIBLE")
{
  Cfg cfg;
  make_tiny(cfg.ptr);
  REQUIRE(starsec_config_set(cfg.ptr, "e_min", "1000000") == STARSEC_OK);
  starsec_channels* ch = nullptr;
  REQUIRE(starsec_channels_generate(cfg.ptr, 3, &ch) == STARSEC_OK);
  std::unique_ptr<starsec_channels, decltype(&starsec_channels_free)> guard(
      ch, starsec_channels_free);

  starsec_result* res = nullptr;
  CHECK(starsec_run(cfg.ptr, ch, "es-ipcsi", &res) == STARSEC_INFEASIBLE);
  REQUIRE(res != nullptr);
  CHECK(std::string(starsec_result_status(res)) == "infeasible");
  starsec_result_free(res);
}

TEST_CASE("sweep writes reproducible CSV and an SVG plot")
{
  Cfg cfg;
  make_tiny(cfg.ptr);
  const double values[2] = {2, 4};
  TempPath csv1("sweep1.csv"), csv2("sweep2.csv"), svg("sweep.svg");

  REQUIRE(starsec_sweep(cfg.ptr, "m", values, 2, "es-ipcsi", 2, 5, 0, csv1.path.c_str(),
                        svg.path.c_str()) == STARSEC_OK);
  REQUIRE(starsec_sweep(cfg.ptr, "m", values, 2, "es-ipcsi", 2, 5, 0, csv2.path.c_str(),
                        nullptr) == STARSEC_OK);

  auto slurp = [](const std::string& p) {
    std::ifstream f(p);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
  };
  CHECK(slurp(csv1.path) == slurp(csv2.path));
  CHECK(slurp(svg.path).find("<svg") != std::string::npos);
}

TEST_CASE("verify-sop helper agrees and reports")
{
  char buf[1 << 16];
  REQUIRE(starsec_verify_sop(5, 50000, 11, buf, sizeof buf) == STARSEC_OK);
  CHECK(std::string(buf).find("closed-form") != std::string::npos);
}

TEST_CASE("oracle reference is callable on tiny instances")
{
  Cfg cfg;
  make_tiny(cfg.ptr);
  starsec_channels* ch = nullptr;
  REQUIRE(starsec_channels_generate(cfg.ptr, 13, &ch) == STARSEC_OK);
  std::unique_ptr<starsec_channels, decltype(&starsec_channels_free)> guard(
      ch, starsec_channels_free);
  double best = -1;
  REQUIRE(starsec_oracle_ssr(cfg.ptr, ch, "es", &best) == STARSEC_OK);
  CHECK(best >= 0.0);
}
