#include <sstream>

#include <Eigen/Dense>

#include "doctest.h"
#include "xbarsim/crossbar.hpp"
#include "xbarsim/errors.hpp"
#include "xbarsim/rng.hpp"
#include "xbarsim/scaling.hpp"

using namespace xbarsim;

namespace {

Crossbar grid_of(const Eigen::MatrixXd& g, double r_wire)
{
    std::vector<MemristorDevice> devs;
    for (Eigen::Index r = 0; r < g.rows(); ++r)
        for (Eigen::Index c = 0; c < g.cols(); ++c) {
            MemristorDevice d;
            d.conductance = g(r, c);
            devs.push_back(d);
        }
    return Crossbar(static_cast<std::size_t>(g.rows()), static_cast<std::size_t>(g.cols()), devs, r_wire,
                    LineModel::wire_resistive);
}

// Dense modified nodal analysis with explicit driver and ground nodes.
Eigen::VectorXd dense_mna(const Eigen::MatrixXd& g, double rw, const Eigen::VectorXd& v)
{
    const Eigen::Index R = g.rows(), C = g.cols(), n = 2 * R * C;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    const double gw = 1 / rw;
    auto col = [&](Eigen::Index i, Eigen::Index k) { return k * R + i; };
    auto row = [&](Eigen::Index i, Eigen::Index k) { return R * C + i * C + k; };
    auto stamp = [&](Eigen::Index a, Eigen::Index c, double gg) {
        A(a, a) += gg;
        A(c, c) += gg;
        A(a, c) -= gg;
        A(c, a) -= gg;
    };
    for (Eigen::Index k = 0; k < C; ++k) {
        A(col(0, k), col(0, k)) += gw;
        b[col(0, k)] += gw * v[k];
        for (Eigen::Index i = 1; i < R; ++i)
            stamp(col(i - 1, k), col(i, k), gw);
    }
    for (Eigen::Index i = 0; i < R; ++i) {
        A(row(i, 0), row(i, 0)) += gw;
        for (Eigen::Index k = 1; k < C; ++k)
            stamp(row(i, k - 1), row(i, k), gw);
        for (Eigen::Index k = 0; k < C; ++k)
            stamp(col(i, k), row(i, k), g(i, k));
    }
    const Eigen::VectorXd x = A.fullPivLu().solve(b);
    Eigen::VectorXd out(R);
    for (Eigen::Index i = 0; i < R; ++i)
        out[i] = gw * x[row(i, 0)];
    return out;
}

}  // namespace

TEST_SUITE("crossbar")
{
    TEST_CASE("ideal VMM is G times V")
    {
        Eigen::MatrixXd g(2, 3);
        g << 1, 2, 3, 4, 5, 6;
        g *= 1e-5;
        const Crossbar x = grid_of(g, 0.0);
        Eigen::VectorXd v(3);
        v << 0.1, -0.2, 0.3;
        const Eigen::VectorXd out = vmm_ideal(x, v);
        CHECK(out[0] == doctest::Approx((g * v)[0]));
        CHECK(out[1] == doctest::Approx((g * v)[1]));
        CHECK(vmm(x, v) == out);
    }

    TEST_CASE("single cell with wire resistance is a series circuit")
    {
        Eigen::MatrixXd g(1, 1);
        g << 50e-6;
        const Crossbar x = grid_of(g, 100.0);
        Eigen::VectorXd v(1);
        v << 0.2;
        CHECK(vmm_wire_resistive(x, v)[0] == doctest::Approx(0.2 / (200.0 + 1 / 50e-6)).epsilon(1e-12));
    }

    TEST_CASE("wire-resistive solve matches dense nodal analysis")
    {
        Rng rng(11);
        for (auto [r, c] : {std::pair{2, 2}, std::pair{3, 5}, std::pair{6, 4}}) {
            Eigen::MatrixXd g(r, c);
            for (Eigen::Index i = 0; i < g.size(); ++i)
                g(i) = rng.uniform(2e-6, 150e-6);
            Eigen::VectorXd v(c);
            for (Eigen::Index i = 0; i < c; ++i)
                v[i] = rng.uniform(-0.2, 0.2);
            const Eigen::VectorXd a = vmm_wire_resistive(grid_of(g, 25.0), v);
            const Eigen::VectorXd b = dense_mna(g, 25.0, v);
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());
        }
    }

    TEST_CASE("zero wire resistance reproduces the ideal result")
    {
        Eigen::MatrixXd g = Eigen::MatrixXd::Constant(4, 4, 30e-6);
        const Crossbar x = grid_of(g, 0.0);
        const Eigen::VectorXd v = Eigen::VectorXd::Constant(4, 0.2);
        CHECK(vmm_wire_resistive(x, v) == vmm_ideal(x, v));
    }

    TEST_CASE("V/2 and V/3 device voltages")
    {
        const Crossbar x = grid_of(Eigen::MatrixXd::Constant(3, 3, 10e-6), 0.0);
        const Eigen::MatrixXd h = device_voltage_map(x, 1, 2, {BiasKind::v_half, 1.2});
        CHECK(h(1, 2) == doctest::Approx(1.2));
        CHECK(h(1, 0) == doctest::Approx(0.6));
        CHECK(h(0, 2) == doctest::Approx(0.6));
        CHECK(h(0, 0) == doctest::Approx(0.0));
        const Eigen::MatrixXd t = device_voltage_map(x, 1, 2, {BiasKind::v_third, 1.2});
        CHECK(t(1, 2) == doctest::Approx(1.2));
        CHECK(t(1, 0) == doctest::Approx(0.4));
        CHECK(t(0, 2) == doctest::Approx(0.4));
        CHECK(t(0, 0) == doctest::Approx(-0.4));
    }

    TEST_CASE("row pulses under V/2 reach only selected devices below 2x threshold")
    {
        DeviceVariationSpec s;
        s.stuck_probability = 0;
        Crossbar x = build_crossbar(4, 4, s, 0.0, 21);
        const Eigen::MatrixXd before = x.conductances();
        const auto rep = apply_row_pulses(x, 2, {true, false, true, false}, 1.3, 500 * us, BiasKind::v_half);
        const Eigen::MatrixXd after = x.conductances();
        CHECK(rep.disturbed == 0);
        for (Eigen::Index r = 0; r < 4; ++r)
            for (Eigen::Index c = 0; c < 4; ++c)
                if (r != 2 || c % 2 == 1)
                    CHECK(after(r, c) == before(r, c));
    }

    TEST_CASE("ladder drop matches a closed form for one segment")
    {
        const double r = 10, g = 1e-3;
        CHECK(ladder_worst_case_drop(1, r, g) == doctest::Approx(r * g / (1 + r * g)).epsilon(1e-14));
        CHECK(ladder_worst_case_drop(5, 0.0, g) == 0.0);
        CHECK_THROWS_AS(ladder_worst_case_drop(0, r, g), DomainError);
    }

    TEST_CASE("write budgets and dimension search")
    {
        CHECK(write_budget(0.7, 1.3, BiasKind::v_third) == doctest::Approx(0.3077).epsilon(1e-3));
        CHECK(write_budget(0.7, 1.3, BiasKind::v_half) == doctest::Approx(0.0769).epsilon(1e-2));
        const auto none = max_crossbar_dimension(0.5, 1.3, 30e-6, 5.0, BiasKind::v_half);
        CHECK(none.n_max == 0);
        CHECK_FALSE(none.diagnostic.empty());
        const auto d = max_crossbar_dimension(0.7, 1.3, g_third_set, experiment_like.r_w, BiasKind::v_third);
        CHECK(ladder_worst_case_drop(d.n_max, experiment_like.r_w, g_third_set) <= d.budget);
        CHECK(ladder_worst_case_drop(d.n_max + 1, experiment_like.r_w, g_third_set) > d.budget);
    }

    TEST_CASE("grid CSV round trip and strict parsing")
    {
        Eigen::MatrixXd g(2, 2);
        g << 1.5e-5, 2.25e-5, std::nan(""), 1e-4;
        std::stringstream ss;
        write_grid_csv(ss, g);
        const Eigen::MatrixXd back = read_grid_csv(ss);
        CHECK(back(0, 0) == 1.5e-5);
        CHECK(std::isnan(back(1, 0)));
        std::stringstream bad("1,2\n3\n");
        CHECK_THROWS_AS(read_grid_csv(bad), ConfigError);
        std::stringstream junk("1,abc\n");
        CHECK_THROWS_AS(read_grid_csv(junk), ConfigError);
    }

    TEST_CASE("snapshot round trip")
    {
        DeviceVariationSpec s;
        s.pristine = true;
        const Crossbar x = build_crossbar(3, 4, s, 1.5, 8);
        const std::string path = "crossbar_test.snapshot";
        write_snapshot(path, x);
        const Crossbar y = read_snapshot(path);
        CHECK(y.rows() == 3);
        CHECK(y.r_wire() == 1.5);
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 4; ++c) {
                CHECK(y.at(r, c).conductance == x.at(r, c).conductance);
                CHECK(y.at(r, c).set_threshold == x.at(r, c).set_threshold);
                CHECK(y.at(r, c).formed == x.at(r, c).formed);
            }
        std::remove(path.c_str());
        CHECK_THROWS_AS(read_snapshot("does_not_exist.snapshot"), ConfigError);
    }

    TEST_CASE("dimension checks")
    {
        CHECK_THROWS_AS(Crossbar(0, 1, {}, 0.0), ConfigError);
        const Crossbar x = grid_of(Eigen::MatrixXd::Constant(2, 2, 1e-5), 0.0);
        CHECK_THROWS_AS(x.at(2, 0), std::out_of_range);
        CHECK_THROWS_AS(vmm_ideal(x, Eigen::VectorXd::Zero(3)), std::invalid_argument);
    }
}
