#pragma once

#include <cstdint>

#include "xbarsim/units.hpp"

namespace xbarsim {

struct DeviceVariationSpec {
    double set_mu = 1.0;
    double set_sigma = 0.13;
    double reset_mu = -1.2;
    double reset_sigma = 0.15;
    double stuck_probability = 0.02;
    Interval stuck_conductance_range{10 * uS, 40 * uS};
    Interval g_init_range{8 * uS, 10 * uS};

    double g_min = 2 * uS;
    double g_max = 150 * uS;
    double nonlinearity_alpha = 0.0;
    // median rate at threshold; per-device rate is lognormal around it
    double kinetics_rate = 0.02 * uS;
    double kinetics_rate_log_sigma = 0.3;
    double kinetics_voltage_scale = 0.06;

    // pristine == false samples devices as already formed
    bool pristine = false;
    double preformed_probability = 0.0;
    Interval pristine_conductance_range{0.5 * uS, 2 * uS};
    double forming_current_mu = 300 * uA;
    double forming_current_sigma = 60 * uA;

    void validate() const;
};

struct MemristorDevice {
    double conductance = 10 * uS;
    double set_threshold = 1.0;
    double reset_threshold = -1.2;
    double g_min = 2 * uS;
    double g_max = 150 * uS;
    double nonlinearity_alpha = 0.0;
    double kinetics_rate = 0.02 * uS;
    double kinetics_voltage_scale = 0.06;
    bool stuck = false;

    // forming state; an unformed device conducts pristine_conductance and ignores pulses
    bool formed = true;
    double pristine_conductance = 1 * uS;
    double forming_current = 300 * uA;

    double effective_conductance() const { return formed ? conductance : pristine_conductance; }
};

inline constexpr double reference_pulse_width = 500 * us;
inline constexpr double safe_read_bound = 2.5;

MemristorDevice sample_device(const DeviceVariationSpec& spec, std::uint64_t seed);

double current(const MemristorDevice& d, double voltage);

// Returns the conductance change (zero when sub-threshold or stuck).
double apply_pulse(MemristorDevice& d, double amplitude, double width = reference_pulse_width);

double read_conductance(const MemristorDevice& d, double v_read = 0.2);

// Conductance change a pulse would cause, without touching the device.
double pulse_delta(const MemristorDevice& d, double amplitude, double width = reference_pulse_width);

}  // namespace xbarsim
