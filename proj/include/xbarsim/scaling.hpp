#pragma once

#include <string>

#include "xbarsim/crossbar.hpp"

namespace xbarsim {

double ladder_worst_case_drop(long n_segments, double r_w, double g);

// Largest relative line drop that keeps half-selected devices undisturbed.
double write_budget(double v_th_min, double v_th_max, BiasKind bias);

struct DimensionResult {
    long n_max = 0;
    double budget = 0.0;
    std::string diagnostic;
};

DimensionResult max_crossbar_dimension(double v_th_min, double v_th_max, double g_select, double r_w,
                                       BiasKind bias);

// Inverse problem: the R_w in the middle of the interval where max_crossbar_dimension == n.
double calibrate_wire_resistance(long n, double budget, double g);

struct ScalingPreset {
    std::string name;
    double r_w;
};

// Representative conductances of loaded lines during writes.
inline constexpr double g_third_set = 30e-6;
inline constexpr double g_third_reset = 50e-6;
inline constexpr double g_half_set = 21e-6;
inline constexpr double g_half_reset = 35e-6;

// Calibrated so that the V/3 set budget yields 70 and 400.
inline const ScalingPreset experiment_like{"experiment-like", 5.49};
inline const ScalingPreset copper{"high-aspect-ratio copper", 0.1720};

}  // namespace xbarsim
