#include "xbarsim/device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xbarsim/errors.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ConfigError("device variation: " + what);
}

}  // namespace

void DeviceVariationSpec::validate() const
{
    require(set_sigma >= 0 && reset_sigma >= 0, "sigmas must be non-negative");
    require(set_mu > 0, "set_mu must be positive");
    require(reset_mu < 0, "reset_mu must be negative");
    require(stuck_probability >= 0 && stuck_probability <= 1, "stuck_probability outside [0,1]");
    require(preformed_probability >= 0 && preformed_probability <= 1, "preformed_probability outside [0,1]");
    require(stuck_conductance_range.valid(), "stuck_conductance_range empty");
    require(g_init_range.valid(), "g_init_range empty");
    require(pristine_conductance_range.valid() && pristine_conductance_range.lo > 0,
            "pristine_conductance_range invalid");
    require(g_min > 0 && g_min < g_max, "need 0 < g_min < g_max");
    require(g_init_range.lo >= g_min && g_init_range.hi <= g_max, "g_init_range outside [g_min, g_max]");
    require(stuck_conductance_range.lo >= g_min && stuck_conductance_range.hi <= g_max,
            "stuck_conductance_range outside [g_min, g_max]");
    require(kinetics_rate > 0 && kinetics_rate_log_sigma >= 0, "kinetics rate invalid");
    require(kinetics_voltage_scale > 0, "kinetics_voltage_scale must be positive");
    require(nonlinearity_alpha >= 0, "nonlinearity_alpha must be non-negative");
    require(forming_current_mu > 0 && forming_current_sigma >= 0, "forming current invalid");
}

MemristorDevice sample_device(const DeviceVariationSpec& spec, std::uint64_t seed)
{
    spec.validate();
    Rng rng(seed);
    MemristorDevice d;
    d.g_min = spec.g_min;
    d.g_max = spec.g_max;
    d.nonlinearity_alpha = spec.nonlinearity_alpha;
    d.kinetics_voltage_scale = spec.kinetics_voltage_scale;

    // fixed draw order keeps devices reproducible when only one knob changes
    d.set_threshold = std::max(1e-3, rng.normal(spec.set_mu, spec.set_sigma));
    d.reset_threshold = std::min(-1e-3, rng.normal(spec.reset_mu, spec.reset_sigma));
    d.kinetics_rate = spec.kinetics_rate * std::exp(rng.normal(0.0, spec.kinetics_rate_log_sigma));
    const bool stuck = rng.bernoulli(spec.stuck_probability);
    const double g_stuck = rng.uniform(spec.stuck_conductance_range.lo, spec.stuck_conductance_range.hi);
    const double g_init = rng.uniform(spec.g_init_range.lo, spec.g_init_range.hi);
    const bool preformed = rng.bernoulli(spec.preformed_probability);
    d.pristine_conductance = rng.uniform(spec.pristine_conductance_range.lo, spec.pristine_conductance_range.hi);
    d.forming_current = std::max(1e-9, rng.normal(spec.forming_current_mu, spec.forming_current_sigma));

    d.stuck = stuck;
    d.conductance = stuck ? g_stuck : g_init;
    d.formed = !spec.pristine || (preformed && !stuck);
    return d;
}

double current(const MemristorDevice& d, double voltage)
{
    if (!(std::abs(voltage) <= safe_read_bound))
        throw DomainError("voltage beyond safe read bound: " + std::to_string(voltage));
    return d.effective_conductance() * voltage * (1.0 + d.nonlinearity_alpha * voltage * voltage);
}

namespace {

double pulsed_conductance(const MemristorDevice& d, double amplitude, double width)
{
    if (!(width > 0))
        throw DomainError("pulse width must be positive");
    if (d.stuck || !d.formed)
        return d.conductance;
    const double scale = width / reference_pulse_width;
    if (amplitude > 0 && amplitude >= d.set_threshold) {
        double step = d.kinetics_rate * scale * std::exp((amplitude - d.set_threshold) / d.kinetics_voltage_scale);
        return std::min(d.g_max, d.conductance + step);
    }
    if (amplitude < 0 && amplitude <= d.reset_threshold) {
        double step = d.kinetics_rate * scale * std::exp((d.reset_threshold - amplitude) / d.kinetics_voltage_scale);
        return std::max(d.g_min, d.conductance - step);
    }
    return d.conductance;
}

}  // namespace

double pulse_delta(const MemristorDevice& d, double amplitude, double width)
{
    return pulsed_conductance(d, amplitude, width) - d.conductance;
}

double apply_pulse(MemristorDevice& d, double amplitude, double width)
{
    const double before = d.conductance;
    d.conductance = pulsed_conductance(d, amplitude, width);
    return d.conductance - before;
}

double read_conductance(const MemristorDevice& d, double v_read)
{
    if (v_read == 0.0)
        throw DomainError("read voltage must be non-zero");
    if (std::abs(v_read) > std::min(d.set_threshold, std::abs(d.reset_threshold)))
        throw DomainError("read voltage would disturb the device");
    return current(d, v_read) / v_read;
}

}  // namespace xbarsim
