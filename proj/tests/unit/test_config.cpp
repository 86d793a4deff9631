#include <doctest.h>

#include <algorithm>

#include "config.hpp"
#include "rng.hpp"

using namespace starsec;

TEST_CASE("db_to_linear known values")
{
  CHECK(db_to_linear(0.0) == doctest::Approx(1.0));
  CHECK(db_to_linear(-20.0) == doctest::Approx(0.01));
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
}

TEST_CASE("db round trip")
{
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-80.0, 40.0);
    CHECK(linear_to_db(db_to_linear(x)) == doctest::Approx(x).epsilon(1e-12));
  }
}

TEST_CASE("defaults match the simulation parameter set")
{
  const SystemConfig cfg;
  CHECK(cfg.num_antennas == 4);
  CHECK(cfg.num_elements == 40);
  CHECK(cfg.noise_bob_t == 1.0);
  CHECK(cfg.noise_bob_r == 1.0);
  CHECK(cfg.noise_eve_t == 1.0);
  CHECK(cfg.noise_eve_r == 1.0);
  CHECK(cfg.pathloss_exponent == doctest::Approx(2.2));
  CHECK(cfg.sop_bound == doctest::Approx(0.5));
  CHECK(cfg.tolerance == doctest::Approx(1e-3));
  CHECK(cfg.max_iters == 30);
  CHECK(cfg.pccp.lambda_init == doctest::Approx(20.0));
  CHECK(cfg.pccp.kappa_init == doctest::Approx(20.0));
  CHECK(cfg.pccp.lambda_max == doctest::Approx(10.0));
  CHECK(cfg.pccp.kappa_max == doctest::Approx(10.0));
  CHECK(cfg.pccp.beta == doctest::Approx(0.8));
  CHECK(cfg.d_bs_ris == doctest::Approx(10.0));
  CHECK(cfg.d_ris_bob == doctest::Approx(10.0));
  CHECK(cfg.p_max == doctest::Approx(db_to_linear(0.0)));   // 0 dBW
  CHECK(cfg.e_min == doctest::Approx(db_to_linear(-20.0)));  // -20 dB
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("validation reports every violation")
{
  SystemConfig cfg;
  cfg.sop_bound = 1.2;
  cfg.num_elements = 0;
  cfg.p_max = -1.0;
  const auto errs = validate_config(cfg);
  REQUIRE(errs.size() == 3);
  auto has = [&](const char* needle) {
    return std::any_of(errs.begin(), errs.end(),
                       [&](const std::string& e) { return e.find(needle) != std::string::npos; });
  };
  CHECK(has("sop_bound out of (0,1)"));
  CHECK(has("num_elements must be positive"));
  CHECK(has("p_max must be positive"));
}

TEST_CASE("config text round trip")
{
  SystemConfig cfg;
  cfg.num_elements = 12;
  cfg.sop_bound = 0.25;
  cfg.e_min = db_to_linear(-12.5);
  cfg.rng_seed = 987654321;
  std::vector<std::string> errors;
  const SystemConfig back = parse_config_text(serialize_config(cfg), &errors);
  CHECK(errors.empty());
  CHECK(back.num_elements == cfg.num_elements);
  CHECK(back.sop_bound == doctest::Approx(cfg.sop_bound));
  CHECK(back.e_min == doctest::Approx(cfg.e_min).epsilon(1e-12));
  CHECK(back.rng_seed == cfg.rng_seed);
}

TEST_CASE("unknown keys and bad values are reported with line numbers")
{
  std::vector<std::string> errors;
  parse_config_text("num_elements = 8\nbogus_key = 3\nsop_bound = huh\n", &errors);
  REQUIRE(errors.size() == 2);
  CHECK(errors[0].find("line 2") != std::string::npos);
  CHECK(errors[1].find("line 3") != std::string::npos);
}

TEST_CASE("dB fields convert at the boundary")
{
  SystemConfig cfg;
  std::string err;
  REQUIRE(apply_config_entry(cfg, "p_max_dbw", "10", &err));
  CHECK(cfg.p_max == doctest::Approx(10.0));
  REQUIRE(apply_config_entry(cfg, "e_min_db", "-30", &err));
  CHECK(cfg.e_min == doctest::Approx(0.001));
}
