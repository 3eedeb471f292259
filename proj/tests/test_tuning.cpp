#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "xbarsim/errors.hpp"
#include "xbarsim/tuning.hpp"

using namespace xbarsim;

TEST_SUITE("tuning")
{
    TEST_CASE("relative error")
    {
        CHECK(tuning_error(50e-6, 52.5e-6) == doctest::Approx(0.05));
        CHECK_THROWS_AS(tuning_error(0.0, 1.0), DomainError);
    }

    TEST_CASE("tunes up and down within tolerance")
    {
        TuningSpec spec;
        spec.tolerance = 0.05;
        for (double target : {12 * uS, 50 * uS, 120 * uS}) {
            MemristorDevice d;
            d.conductance = 60 * uS;
            const auto r = tune(d, target, spec);
            CHECK(r.converged);
            CHECK(r.error <= 0.05);
            CHECK(tuning_error(target, d.conductance) <= 0.05);
        }
    }

    TEST_CASE("already within tolerance uses no pulses")
    {
        MemristorDevice d;
        d.conductance = 50 * uS;
        const auto r = tune(d, 51 * uS, TuningSpec{});
        CHECK(r.converged);
        CHECK(r.pulses_used == 0);
    }

    TEST_CASE("stuck and unreachable targets report failure")
    {
        MemristorDevice d;
        d.stuck = true;
        d.conductance = 20 * uS;
        const auto r = tune(d, 80 * uS, TuningSpec{});
        CHECK_FALSE(r.converged);
        CHECK(r.diagnostic == "device is stuck");

        MemristorDevice e;
        TuningSpec spec;
        spec.max_pulses = 500;
        const auto u = tune(e, 400 * uS, spec);
        CHECK_FALSE(u.converged);
        CHECK(u.pulses_used == 500);
        CHECK(e.conductance == e.g_max);
    }

    TEST_CASE("import skips NaN targets")
    {
        std::vector<MemristorDevice> devs(4);
        Crossbar x(2, 2, devs, 0.0);
        Eigen::MatrixXd t(2, 2);
        t << 40e-6, std::nan(""), 70e-6, std::nan("");
        const auto r = import_conductance_map(x, t, TuningSpec{}, true);
        CHECK(std::isnan(r.errors(0, 1)));
        CHECK(r.errors(0, 0) <= 0.30);
        CHECK(x.at(0, 1).conductance == MemristorDevice{}.conductance);
        CHECK(r.non_converged == 0);
    }

    TEST_CASE("histogram binning with overflow bin")
    {
        const Histogram h = error_histogram({0.0, 0.004, 0.006, 0.049, 0.2, std::nan("")}, 0.005, 0.05);
        CHECK(h.edges.size() == 11);
        CHECK(h.counts.size() == 11);
        CHECK(h.counts[0] == 2);
        CHECK(h.counts[1] == 1);
        CHECK(h.counts[9] == 1);
        CHECK(h.counts[10] == 1);
        CHECK(std::accumulate(h.counts.begin(), h.counts.end(), 0L) == 5);
        CHECK(h.max_value == 0.2);
        std::ostringstream os;
        write_histogram_json(os, h);
        CHECK(os.str().find("\"counts\"") != std::string::npos);
    }

    TEST_CASE("smiley map spans the gray scale")
    {
        const Eigen::MatrixXd m = smiley_target_map();
        CHECK(m.rows() == 20);
        CHECK(m.cols() == 20);
        CHECK(m.minCoeff() >= 1.0 / 84e3 * (1 - 1e-12));
        CHECK(m.maxCoeff() <= 1.0 / 7e3 * (1 + 1e-12));
        CHECK(m.maxCoeff() > 5 * m.minCoeff());
    }
}
