#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "xbarsim/errors.hpp"
#include "xbarsim/forming.hpp"

using namespace xbarsim;

namespace {

Crossbar single(const MemristorDevice& d)
{
    return Crossbar(1, 1, {d}, 0.0);
}

MemristorDevice pristine(double forming_current)
{
    MemristorDevice d;
    d.formed = false;
    d.pristine_conductance = 1 * uS;
    d.forming_current = forming_current;
    return d;
}

}  // namespace

TEST_SUITE("forming")
{
    TEST_CASE("low-resistance device is reported preformed and reset low")
    {
        MemristorDevice d;
        d.conductance = 60 * uS;
        Crossbar x = single(d);
        const FormingSpec spec;
        const auto out = form_device(x, 0, 0, spec);
        CHECK(out.status == FormingStatus::preformed);
        CHECK(out.attempts_used == 0);
        CHECK(x.at(0, 0).conductance <= spec.g_low);
    }

    TEST_CASE("forms at the first ceiling above the forming current")
    {
        Crossbar x = single(pristine(250 * uA));
        const FormingSpec spec;
        const auto out = form_device(x, 0, 0, spec);
        CHECK(out.status == FormingStatus::formed);
        // ceilings 180, 200, 220, 240, 260
        CHECK(out.attempts_used == 5);
        CHECK(out.trace.back().first == doctest::Approx(260 * uA));
        CHECK(out.trace.back().second >= spec.r_min_ratio);
        CHECK(x.at(0, 0).formed);
        CHECK(x.at(0, 0).conductance <= spec.g_low);
    }

    TEST_CASE("second round escalates the ceiling")
    {
        Crossbar x = single(pristine(600 * uA));
        const FormingSpec spec;
        const auto out = form_device(x, 0, 0, spec);
        CHECK(out.status == FormingStatus::formed);
        // round two ceilings are 1.25 * (180 + 20k); k = 15 is the first >= 600
        CHECK(out.attempts_used == 19 + 16);
        CHECK(out.trace[18].first == doctest::Approx(540 * uA));
    }

    TEST_CASE("unformable device is defective and frozen")
    {
        Crossbar x = single(pristine(900 * uA));
        const auto out = form_device(x, 0, 0, FormingSpec{});
        CHECK(out.status == FormingStatus::defective);
        CHECK(out.attempts_used == 38);
        CHECK(x.at(0, 0).stuck);
        CHECK(x.at(0, 0).conductance == doctest::Approx(2 * uS));
    }

    TEST_CASE("reset_to_low escalates until the state is low")
    {
        MemristorDevice d;
        d.conductance = 140 * uS;
        d.reset_threshold = -1.6;
        const FormingSpec spec;
        const int n = reset_to_low(d, spec);
        CHECK(n > 0);
        CHECK(n < spec.max_reset_pulses);
        CHECK(d.conductance <= spec.g_low);
    }

    TEST_CASE("form_all validates targets and reports JSON")
    {
        DeviceVariationSpec s;
        s.pristine = true;
        Crossbar x = build_crossbar(4, 4, s, 0.0, 17);
        const FormingSpec spec;
        CHECK_THROWS_AS(form_all(x, {{0, 0}, {0, 0}}, spec), ConfigError);
        CHECK_THROWS_AS(form_all(x, {{4, 0}}, spec), ConfigError);
        const auto rep = form_all(x, all_cells(x), spec);
        CHECK(rep.outcomes.size() == 16);
        std::ostringstream os;
        write_report_json(os, rep);
        const auto j = nlohmann::json::parse(os.str());
        CHECK(j["devices"].size() == 16);
        CHECK(j["defective_fraction"].get<double>() == doctest::Approx(rep.defective_fraction()));
        for (const auto& dev : j["devices"])
            CHECK(dev.contains("status"));
    }

    TEST_CASE("invalid forming spec")
    {
        FormingSpec spec;
        spec.i_stop = 100 * uA;
        CHECK_THROWS_AS(spec.validate(), ConfigError);
        CHECK(std::string(to_string(FormingStatus::defective)) == "defective");
    }
}
