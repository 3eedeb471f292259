#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "xbarsim/benchmark.hpp"
#include "xbarsim/errors.hpp"

using namespace xbarsim;

namespace {

Pattern make(const std::string& bits, char letter)
{
    Pattern p;
    for (std::size_t i = 0; i < 16; ++i)
        p.pixels[i] = bits[i] == '1';
    p.label = class_index(letter);
    return p;
}

// Multiclass perceptron; returns true when it reaches zero training errors.
bool perceptron_separates(const Dataset& d, int epochs)
{
    std::vector<std::array<double, 17>> w(n_classes, std::array<double, 17>{});
    for (int e = 0; e < epochs; ++e) {
        int errors = 0;
        for (const auto& p : d) {
            std::array<double, 17> x{};
            for (std::size_t i = 0; i < 16; ++i)
                x[i] = p.pixels[i] ? 1 : -1;
            x[16] = 1;
            std::array<double, n_classes> score{};
            for (std::size_t c = 0; c < n_classes; ++c)
                for (std::size_t i = 0; i < 17; ++i)
                    score[c] += w[c][i] * x[i];
            // strongest competitor; ties count as mistakes
            std::size_t best = p.label;
            for (std::size_t c = 0; c < n_classes; ++c)
                if (c != p.label && (best == p.label ? score[c] >= score[p.label] : score[c] > score[best]))
                    best = c;
            if (best != p.label) {
                ++errors;
                for (std::size_t i = 0; i < 17; ++i) {
                    w[p.label][i] += x[i];
                    w[best][i] -= x[i];
                }
            }
        }
        if (errors == 0)
            return true;
    }
    return false;
}

}  // namespace

TEST_SUITE("benchmark")
{
    TEST_CASE("embedded training set equals the data file")
    {
        const Dataset file = read_patterns(std::string(XBARSIM_DATA_DIR) + "/canonical_training.txt");
        const Dataset embedded = canonical_training_set();
        REQUIRE(file.size() == 40);
        REQUIRE(embedded.size() == 40);
        for (std::size_t i = 0; i < 40; ++i) {
            CHECK(file[i].pixels == embedded[i].pixels);
            CHECK(file[i].label == embedded[i].label);
        }
        for (std::size_t c = 0; c < n_classes; ++c)
            CHECK(std::count_if(file.begin(), file.end(), [c](const Pattern& p) { return p.label == c; }) == 10);
    }

    TEST_CASE("pattern file round trip and strictness")
    {
        std::stringstream ss;
        write_patterns(ss, canonical_training_set());
        const Dataset back = read_patterns(ss);
        CHECK(back.size() == 40);
        std::stringstream bad("0101 A\n");
        CHECK_THROWS_AS(read_patterns(bad), ConfigError);
        std::stringstream letter("0000000000000000 Q\n");
        CHECK_THROWS_AS(read_patterns(letter), ConfigError);
    }

    TEST_CASE("test set is every single-pixel flip")
    {
        const Dataset train = canonical_training_set();
        const Dataset test = generate_test_set(train);
        CHECK(test.size() == 640);
        std::set<std::string> seen;
        for (const auto& p : test) {
            const auto& parent = train[static_cast<std::size_t>(p.parent)];
            int d = 0;
            for (std::size_t i = 0; i < 16; ++i)
                d += p.pixels[i] != parent.pixels[i];
            CHECK(d == 1);
            CHECK(p.label == parent.label);
            seen.insert(std::to_string(p.parent) + ":" + std::to_string(p.flipped));
        }
        CHECK(seen.size() == 640);
    }

    TEST_CASE("class selection")
    {
        const Dataset s = select_classes(canonical_training_set(), "AVT");
        CHECK(s.size() == 30);
        for (const auto& p : s)
            CHECK(p.label != class_index('X'));
        CHECK_THROWS_AS(class_index('Z'), ConfigError);
    }

    TEST_CASE("fidelity and confusion")
    {
        const Dataset d = canonical_training_set();
        const auto r = evaluate_fidelity([](const Pixels&) { return std::size_t{0}; }, d);
        CHECK(r.fidelity == doctest::Approx(0.25));
        CHECK(r.confusion(1, 0) == 10);
        CHECK(r.confusion.sum() == 40);
    }

    TEST_CASE("percentile summary")
    {
        const SweepRow r = summarize(0.1, {4, 1, 3, 2});
        CHECK(r.median == doctest::Approx(2.5));
        CHECK(r.p25 == doctest::Approx(1.75));
        CHECK(r.p75 == doctest::Approx(3.25));
        CHECK(r.min == 1);
        CHECK(r.max == 4);
        CHECK(sigma_for_tolerance(0.3) == doctest::Approx(0.3 / std::sqrt(3.0)));
    }

    TEST_CASE("precision sweep is reproducible and noiseless at zero")
    {
        Eigen::MatrixXd w1 = Eigen::MatrixXd::Constant(17, 10, 5e-6);
        Eigen::MatrixXd w2 = Eigen::MatrixXd::Constant(11, 4, -3e-6);
        const Dataset train = canonical_training_set();
        const auto a = precision_sweep(w1, w2, {0.0, 0.2}, 5, 9, train, train, 90e-6);
        const auto b = precision_sweep(w1, w2, {0.0, 0.2}, 5, 9, train, train, 90e-6);
        CHECK(a.train[1].median == b.train[1].median);
        CHECK(a.train[0].p25 == a.train[0].p75);
        std::ostringstream os;
        write_sweep_csv(os, a.train);
        CHECK(os.str().find("sigma") == 0);
    }

    TEST_CASE("linear separability")
    {
        // XOR on two pixels, other pixels constant
        const Dataset xr{make("0000000000000000", 'A'), make("1100000000000000", 'A'),
                         make("1000000000000000", 'T'), make("0100000000000000", 'T')};
        CHECK_FALSE(linear_separability_check(xr));
        CHECK_FALSE(perceptron_separates(xr, 1000));
        const Dataset easy{make("1000000000000000", 'A'), make("0100000000000000", 'T'),
                           make("0010000000000000", 'V'), make("0001000000000000", 'X')};
        CHECK(linear_separability_check(easy));
        CHECK(perceptron_separates(easy, 1000));
        const Dataset canon = canonical_training_set();
        CHECK_FALSE(linear_separability_check(canon));
        CHECK_FALSE(perceptron_separates(canon, 2000));
    }
}
