#include <fstream>

#include "doctest.h"
#include "xbarsim/config.hpp"
#include "xbarsim/errors.hpp"

using namespace xbarsim;

TEST_SUITE("config")
{
    TEST_CASE("quantities with SI prefixes")
    {
        CHECK(parse_quantity("50uS", "S") == doctest::Approx(50e-6));
        CHECK(parse_quantity("50\xC2\xB5S", "S") == doctest::Approx(50e-6));
        CHECK(parse_quantity("-1.8V", "V") == -1.8);
        CHECK(parse_quantity("180uA", "A") == doctest::Approx(180e-6));
        CHECK(parse_quantity("200kOhm", "Ohm") == doctest::Approx(200e3));
        CHECK(parse_quantity("5.49Ohm", "Ohm") == 5.49);
        CHECK(parse_quantity("500us", "s") == doctest::Approx(500e-6));
        CHECK(parse_quantity("2.5mV", "V") == doctest::Approx(2.5e-3));
    }

    TEST_CASE("malformed quantities are rejected")
    {
        CHECK_THROWS_AS(parse_quantity("50", "S"), ConfigError);
        CHECK_THROWS_AS(parse_quantity("50 uS", "S"), ConfigError);
        CHECK_THROWS_AS(parse_quantity("uS", "S"), ConfigError);
        CHECK_THROWS_AS(parse_quantity("50uA", "S"), ConfigError);
        CHECK_THROWS_AS(parse_quantity("abcS", "S"), ConfigError);
        CHECK_THROWS_AS(parse_quantity("1e400V", "V"), ConfigError);
        CHECK_THROWS_AS(parse_quantity("50xS", "S"), ConfigError);
    }

    TEST_CASE("empty config gives the defaults")
    {
        const auto c = parse_config_text("{}");
        CHECK(c.seed == 1);
        CHECK(c.hardware.rows == 20);
        CHECK(c.tuning.tolerance == 0.05);
        CHECK(c.hardware.import_tuning.tolerance == 0.30);
        CHECK(c.training.seed == 1);
        CHECK_FALSE(c.forming_targets.has_value());
    }

    TEST_CASE("sections are read with units")
    {
        const auto c = parse_config_text(R"({
            "seed": 9,
            "device": {"stuck_probability": 0.05, "stuck_conductance_range": ["12uS", "30uS"]},
            "crossbar": {"wire_resistance": "2Ohm", "line_model": "wire_resistive"},
            "forming": {"i_start": "200uA", "targets": [[0, 1], [2, 3]]},
            "tuning": {"tolerance": 0.1},
            "training": {"epochs": 10, "g_bias": "60uS"},
            "manhattan": {"bias": "V_third", "amplitude": "1.2V"},
            "benchmark": {"sweep_runs": 3, "sweep_sigmas": [0, 0.1]}
        })");
        CHECK(c.seed == 9);
        CHECK(c.training.seed == 9);
        CHECK(c.hardware.devices.stuck_probability == 0.05);
        CHECK(c.hardware.devices.stuck_conductance_range.lo == doctest::Approx(12e-6));
        CHECK(c.hardware.r_wire == 2.0);
        CHECK(c.hardware.line_model == LineModel::wire_resistive);
        CHECK(c.hardware.forming.i_start == doctest::Approx(200e-6));
        REQUIRE(c.forming_targets.has_value());
        CHECK(c.forming_targets->size() == 2);
        CHECK(c.tuning.tolerance == 0.1);
        CHECK(c.training.g_bias == doctest::Approx(60e-6));
        CHECK(c.manhattan.bias == BiasKind::v_third);
        CHECK(c.benchmark.sweep_sigmas.size() == 2);
    }

    TEST_CASE("strict rejection")
    {
        CHECK_THROWS_AS(parse_config_text("{"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"sed": 1})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"device": {"g_min": 2e-6}})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"device": {"stuck_probability": 2}})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"crossbar": {"rows": 10}})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"crossbar": {"line_model": "spice"}})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"forming": {"targets": [[0, 0], [0, 0]]}})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"forming": {"targets": [[25, 0]]}})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"training": {"epochs": -1}})"), ConfigError);
        CHECK_THROWS_AS(parse_config_text(R"({"benchmark": {"sweep_runs": 0}})"), ConfigError);
        CHECK_THROWS_AS(load_config("no_such_config.json"), ConfigError);
    }

    TEST_CASE("shipped example config loads")
    {
        const auto c = load_config(std::string(XBARSIM_DATA_DIR) + "/example_config.json");
        CHECK(c.benchmark.sweep_runs >= 1);
        CHECK(training_set(c).size() == 40);
    }
}
