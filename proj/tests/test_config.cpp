#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "georoute/config.hpp"

using namespace georoute;

TEST_CASE("every key round trips through format and parse") {
  ScenarioConfig cfg;
  cfg.rho = 0.25;
  cfg.mcs = McsProfile::parse("16QAM-3/4");
  cfg.channel = FadingChannelModel{3, {1.0, 1.0, 1.0}, 0.4e-3};
  cfg.slicing = SlicingStrategy::EqualArea;
  cfg.averaging = Averaging::PlugIn;
  auto text = format_config(cfg);
  auto back = parse_config_text(text);
  for (const auto& k : config_keys()) CHECK_MESSAGE(get_config_value(back, k) == get_config_value(cfg, k), k);
  CHECK(format_config(back) == text);
}

TEST_CASE("comments, blanks and errors") {
  auto cfg = parse_config_text("# header\n\nrho = 2 # trailing\nN=8\n");
  CHECK(cfg.rho == 2.0);
  CHECK(cfg.N == 8);
  CHECK_THROWS_WITH_AS(parse_config_text("bogus=1\n"), doctest::Contains("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("rho\n"), std::invalid_argument);
  ScenarioConfig c;
  CHECK_THROWS_AS(set_config_value(c, "N", "many"), std::invalid_argument);
  CHECK(is_config_key("T_p"));
  CHECK_FALSE(is_config_key("T_q"));
  set_config_value(c, "P_tmax_dBm", "20");
  CHECK(c.P_tmax == doctest::Approx(0.1));
}

TEST_CASE("validation rejects inconsistent configurations") {
  ScenarioConfig c;
  CHECK_NOTHROW(c.validate());
  c.T_c = 2 * c.T_p;
  CHECK_THROWS(c.validate());
  c = ScenarioConfig{};
  c.epsilon = 1.5;
  CHECK_THROWS(c.validate());
  c = ScenarioConfig{};
  c.N = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("payload length follows T_p and the MCS") {
  ScenarioConfig c;
  double expected = c.T_p * c.symbol_rate() * c.mcs.info_bits_per_symbol();
  CHECK(c.payload_bits() == static_cast<long>(std::llround(expected)));
  CHECK(c.control_bits() < c.payload_bits());
}

TEST_CASE("config files load") {
  const char* path = "georoute_test_config.cfg";
  {
    std::ofstream f(path);
    f << "name=file\nD=250\n";
  }
  auto cfg = load_config_file(path);
  CHECK(cfg.name == "file");
  CHECK(cfg.D == 250.0);
  std::remove(path);
  CHECK_THROWS(load_config_file("/nonexistent/georoute.cfg"));
  CHECK(format_number(0.1) == "0.1");
}
