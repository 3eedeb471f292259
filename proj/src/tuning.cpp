#include "xbarsim/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "xbarsim/errors.hpp"

namespace xbarsim {

void TuningSpec::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw ConfigError(std::string("tuning: ") + what);
    };
    require(tolerance > 0, "tolerance must be positive");
    require(v_read != 0.0, "v_read must be non-zero");
    require(set_amplitude_range.valid() && set_amplitude_range.lo > 0, "set range must be positive and ordered");
    require(reset_amplitude_range.valid() && reset_amplitude_range.hi < 0, "reset range must be negative and ordered");
    require(pulse_width > 0, "pulse width must be positive");
    require(max_pulses >= 1, "max_pulses must be at least 1");
    require(amplitude_step > 0, "amplitude step must be positive");
    require(progress_fraction >= 0 && progress_fraction < 1, "progress fraction outside [0,1)");
}

double tuning_error(double target, double actual)
{
    if (!(target > 0))
        throw DomainError("tuning target must be positive");
    return std::abs(actual - target) / target;
}

TuningResult tune(MemristorDevice& d, double target, const TuningSpec& spec)
{
    spec.validate();
    TuningResult res;
    if (d.stuck) {
        res.final_conductance = read_conductance(d, spec.v_read);
        res.error = tuning_error(target, res.final_conductance);
        res.converged = res.error <= spec.tolerance;
        res.diagnostic = "device is stuck";
        return res;
    }
    int polarity = 0;
    double amp = 0.0;
    for (;;) {
        const double g = read_conductance(d, spec.v_read);
        res.final_conductance = g;
        res.error = tuning_error(target, g);
        if (res.error <= spec.tolerance) {
            res.converged = true;
            return res;
        }
        if (res.pulses_used >= spec.max_pulses) {
            res.diagnostic = "pulse budget exhausted";
            return res;
        }
        const int want = g < target ? 1 : -1;
        if (want != polarity) {
            polarity = want;
            amp = polarity > 0 ? spec.set_amplitude_range.lo : spec.reset_amplitude_range.hi;
        }
        apply_pulse(d, amp, spec.pulse_width);
        ++res.pulses_used;
        const double moved = std::abs(read_conductance(d, spec.v_read) - g);
        if (moved < spec.progress_fraction * std::abs(target - g)) {
            amp = polarity > 0 ? std::min(spec.set_amplitude_range.hi, amp + spec.amplitude_step)
                               : std::max(spec.reset_amplitude_range.lo, amp - spec.amplitude_step);
        }
    }
}

TuningResult tune_device(Crossbar& xbar, std::size_t row, std::size_t col, double target, const TuningSpec& spec)
{
    return tune(xbar.at(row, col), target, spec);
}

ImportResult import_conductance_map(Crossbar& xbar, const Eigen::MatrixXd& targets, const TuningSpec& spec,
                                    bool skip_stuck)
{
    spec.validate();
    if (static_cast<std::size_t>(targets.rows()) != xbar.rows() ||
        static_cast<std::size_t>(targets.cols()) != xbar.cols())
        throw std::invalid_argument("target grid shape does not match crossbar");
    ImportResult out;
    out.errors = Eigen::MatrixXd::Constant(targets.rows(), targets.cols(), std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index r = 0; r < targets.rows(); ++r) {
        for (Eigen::Index c = 0; c < targets.cols(); ++c) {
            const double t = targets(r, c);
            if (std::isnan(t))
                continue;
            auto& d = xbar.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            if (d.stuck && skip_stuck) {
                out.errors(r, c) = tuning_error(t, read_conductance(d, spec.v_read));
                continue;
            }
            const auto res = tune(d, t, spec);
            out.pulses += res.pulses_used;
            if (!res.converged)
                ++out.non_converged;
            out.errors(r, c) = res.error;
        }
    }
    return out;
}

Histogram error_histogram(const std::vector<double>& values, double bin_width, double upper)
{
    if (!(bin_width > 0) || !(upper > 0))
        throw DomainError("histogram needs positive bin width and upper edge");
    Histogram h;
    const auto nbins = static_cast<std::size_t>(std::ceil(upper / bin_width - 1e-9));
    for (std::size_t i = 0; i <= nbins; ++i)
        h.edges.push_back(static_cast<double>(i) * bin_width);
    h.counts.assign(nbins + 1, 0);  // last bin collects overflow
    for (double v : values) {
        if (std::isnan(v))
            continue;
        h.max_value = std::max(h.max_value, v);
        auto i = static_cast<std::size_t>(v / bin_width);
        h.counts[std::min(i, nbins)]++;
    }
    return h;
}

void write_histogram_json(std::ostream& os, const Histogram& h)
{
    nlohmann::ordered_json j;
    j["edges"] = h.edges;
    j["counts"] = h.counts;
    j["max"] = h.max_value;
    os << j.dump(1) << '\n';
}

Eigen::MatrixXd smiley_target_map(std::size_t rows, std::size_t cols)
{
    const double g_white = 1.0 / (84 * kOhm);
    const double g_black = 1.0 / (7 * kOhm);
    Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const double cy = (static_cast<double>(rows) - 1) / 2.0, cx = (static_cast<double>(cols) - 1) / 2.0;
    const double radius = 0.47 * static_cast<double>(std::min(rows, cols));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double y = (static_cast<double>(r) - cy) / radius;
            const double x = (static_cast<double>(c) - cx) / radius;
            const double rho = std::hypot(x, y);
            double level;
            if (rho > 1.0) {
                level = 255.0 * 0.15 * (x + 1.0) / 2.0;  // faint background ramp
            } else {
                level = 40.0 + 60.0 * rho * rho;  // shaded face
                const bool eye = std::hypot(std::abs(x) - 0.38, y + 0.3) < 0.17;
                const double mouth_r = std::hypot(x, y + 0.05);
                const bool mouth = y > 0.2 && mouth_r > 0.45 && mouth_r < 0.62;
                const bool rim = rho > 0.9;
                if (eye || mouth || rim)
                    level = 215.0 + 40.0 * (1.0 - rho);
            }
            const auto l = std::clamp(std::round(level), 0.0, 255.0);
            g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = g_white + (g_black - g_white) * l / 255.0;
        }
    }
    return g;
}

}  // namespace xbarsim