#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xbarsim/crossbar.hpp"

namespace xbarsim {

struct TuningSpec {
    double tolerance = 0.30;
    double v_read = 0.2;
    Interval set_amplitude_range{0.8, 1.5};
    Interval reset_amplitude_range{-1.8, -0.8};
    double pulse_width = 500 * us;
    long max_pulses = 10000;
    double amplitude_step = 0.01;
    // a pulse is ineffective when it moves the state by less than this share of the remaining error
    double progress_fraction = 0.01;

    void validate() const;
};

struct TuningResult {
    double final_conductance = 0.0;
    long pulses_used = 0;
    bool converged = false;
    double error = 0.0;
    std::string diagnostic;
};

double tuning_error(double target, double actual);

TuningResult tune_device(Crossbar& xbar, std::size_t row, std::size_t col, double target, const TuningSpec& spec);

// Device-level loop, used by tune_device and by tests that need an isolated device.
TuningResult tune(MemristorDevice& d, double target, const TuningSpec& spec);

struct ImportResult {
    Eigen::MatrixXd errors;
    long pulses = 0;
    std::size_t non_converged = 0;
};

// NaN targets mark cells that are not addressed.
ImportResult import_conductance_map(Crossbar& xbar, const Eigen::MatrixXd& targets, const TuningSpec& spec,
                                    bool skip_stuck);

struct Histogram {
    std::vector<double> edges;
    std::vector<long> counts;
    double max_value = 0.0;
};

Histogram error_histogram(const std::vector<double>& values, double bin_width, double upper);

void write_histogram_json(std::ostream& os, const Histogram& h);

// 256-gray-level smiley face between 84 kOhm (white, level 0) and 7 kOhm (black, level 255).
Eigen::MatrixXd smiley_target_map(std::size_t rows = 20, std::size_t cols = 20);

}  // namespace xbarsim