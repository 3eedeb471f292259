#include <cmath>

#include "doctest.h"
#include "xbarsim/benchmark.hpp"
#include "xbarsim/mlp.hpp"
#include "xbarsim/rng.hpp"

using namespace xbarsim;

namespace {

ConductancePairMap random_map(Rng& rng, Eigen::Index in, Eigen::Index out, int layer)
{
    ConductancePairMap m{Eigen::MatrixXd(in, out), Eigen::MatrixXd(in, out), layer};
    for (Eigen::Index i = 0; i < m.plus.size(); ++i) {
        m.plus(i) = rng.uniform(10e-6, 100e-6);
        m.minus(i) = rng.uniform(10e-6, 100e-6);
    }
    return m;
}

Crossbar crossbar_from(const Eigen::MatrixXd& grid)
{
    std::vector<MemristorDevice> devs;
    for (Eigen::Index r = 0; r < grid.rows(); ++r)
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            MemristorDevice d;
            d.conductance = std::isnan(grid(r, c)) ? 5e-6 : grid(r, c);
            devs.push_back(d);
        }
    return Crossbar(static_cast<std::size_t>(grid.rows()), static_cast<std::size_t>(grid.cols()), devs, 0.0);
}

}  // namespace

TEST_SUITE("mlp")
{
    TEST_CASE("neuron transfer functions")
    {
        CHECK(neuron_hidden(0.0) == 0.0);
        CHECK(neuron_hidden(1e-6) == doctest::Approx(0.2 * std::tanh(1.0)));
        CHECK(neuron_hidden(1.0) == doctest::Approx(0.2));
        CHECK(neuron_output(3e-6) == doctest::Approx(3.0));
        NetworkTopology t;
        t.output_rail = 1.0;
        CHECK(neuron_output(3e-6, t) == 1.0);
    }

    TEST_CASE("input encoding")
    {
        Pixels p{};
        p[0] = 1;
        const Eigen::VectorXd x = encode_inputs(p);
        CHECK(x.size() == 17);
        CHECK(x[0] == 0.2);
        CHECK(x[1] == -0.2);
        CHECK(x[16] == 0.2);
    }

    TEST_CASE("argmax breaks ties toward the lowest index")
    {
        Eigen::VectorXd v(4);
        v << 1, 3, 3, 2;
        CHECK(argmax_lowest(v) == 1);
    }

    TEST_CASE("layer output by hand")
    {
        ConductancePairMap m{Eigen::MatrixXd(2, 1), Eigen::MatrixXd(2, 1), 1};
        m.plus << 30e-6, 10e-6;
        m.minus << 10e-6, 20e-6;
        Eigen::VectorXd x(2);
        x << 0.2, -0.2;
        // delta = 0.2 * 20e-6 - 0.2 * (-10e-6) = 6e-6
        CHECK(layer_forward(m, x, Activation::output)[0] == doctest::Approx(6.0));
        CHECK(layer_forward(m, x, Activation::hidden)[0] == doctest::Approx(0.2 * std::tanh(6.0)));
    }

    TEST_CASE("pair grid layout round trip")
    {
        Rng rng(2);
        const auto m = random_map(rng, 17, 10, 1);
        const Eigen::MatrixXd g = to_crossbar_grid(m, 20, 20);
        CHECK(g(4, 3) == m.plus(3, 2));
        CHECK(g(5, 3) == m.minus(3, 2));
        CHECK(std::isnan(g(0, 19)));
        const auto back = from_crossbar_grid(g, 17, 10, 1);
        CHECK(back.plus == m.plus);
        CHECK(back.minus == m.minus);
        CHECK_THROWS_AS(to_crossbar_grid(m, 19, 20), std::invalid_argument);
    }

    TEST_CASE("crossbar inference equals map inference")
    {
        Rng rng(3);
        const auto a = random_map(rng, 17, 10, 1);
        const auto b = random_map(rng, 11, 4, 2);
        const Crossbar x1 = crossbar_from(to_crossbar_grid(a, 20, 20));
        const Crossbar x2 = crossbar_from(to_crossbar_grid(b, 20, 20));
        for (const auto& p : canonical_training_set()) {
            const auto r1 = infer(a, b, p.pixels);
            const auto r2 = infer(x1, x2, p.pixels);
            CHECK(r1.predicted == r2.predicted);
            CHECK((r1.outputs - r2.outputs).cwiseAbs().maxCoeff() < 1e-9);
            const auto r3 = infer_weights(a.plus - a.minus, b.plus - b.minus, p.pixels);
            CHECK((r1.outputs - r3.outputs).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}
