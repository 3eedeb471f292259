#include "xbarsim/forming.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "xbarsim/errors.hpp"

namespace xbarsim {

void FormingSpec::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok)
            throw ConfigError(std::string("forming: ") + what);
    };
    require(i_start > 0 && i_start <= i_stop, "need 0 < I_start <= I_stop");
    require(i_step > 0, "I_step must be positive");
    require(r_min_ratio > 1, "R_min ratio must exceed 1");
    require(v_reset < 0, "V_reset must be negative");
    require(r_th > 0, "R_TH must be positive");
    require(max_attempts >= 1 && max_rounds >= 1, "attempt counts must be at least 1");
    require(ceiling_escalation >= 1, "ceiling escalation must be >= 1");
    require(v_check > 0 && v_form > 0, "check and forming voltages must be positive");
    require(g_low > 0, "g_low must be positive");
    require(v_reset_limit <= v_reset, "reset limit must not be above V_reset");
    require(reset_step > 0 && max_reset_pulses >= 0, "reset ladder invalid");
}

const char* to_string(FormingStatus s)
{
    switch (s) {
    case FormingStatus::preformed:
        return "preformed";
    case FormingStatus::formed:
        return "formed";
    case FormingStatus::defective:
        return "defective";
    }
    return "?";
}

double FormingReport::defective_fraction() const
{
    if (outcomes.empty())
        return 0.0;
    const auto n = std::count_if(outcomes.begin(), outcomes.end(),
                                 [](const FormingOutcome& o) { return o.status == FormingStatus::defective; });
    return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

int reset_to_low(MemristorDevice& d, const FormingSpec& spec)
{
    if (d.stuck || !d.formed)
        return 0;
    double amp = spec.v_reset;
    int pulses = 0;
    while (d.conductance > spec.g_low && pulses < spec.max_reset_pulses) {
        const double before = d.conductance;
        apply_pulse(d, amp);
        ++pulses;
        // escalate when the pulse achieved less than 2% of the state
        if (before - d.conductance < 0.02 * before)
            amp = std::max(spec.v_reset_limit, amp - spec.reset_step);
    }
    return pulses;
}

namespace {

double check_current(const MemristorDevice& d, const FormingSpec& spec)
{
    return current(d, spec.v_check);
}

// One current-controlled sweep; the device forms once the ceiling reaches its forming current.
void sweep(MemristorDevice& d, double ceiling, const FormingSpec& spec)
{
    if (d.formed || d.stuck || ceiling < d.forming_current)
        return;
    d.formed = true;
    d.conductance = std::clamp(ceiling / spec.v_form, d.g_min, d.g_max);
}

}  // namespace

FormingOutcome form_device(Crossbar& xbar, std::size_t row, std::size_t col, const FormingSpec& spec)
{
    spec.validate();
    MemristorDevice& d = xbar.at(row, col);
    FormingOutcome out;
    out.row = row;
    out.col = col;

    if (spec.v_check / check_current(d, spec) < spec.r_th) {
        out.status = FormingStatus::preformed;
        reset_to_low(d, spec);
        return out;
    }

    for (int round = 0; round < spec.max_rounds; ++round) {
        if (round > 0) {
            // second chance: lower the leakage of everything formed so far
            for (std::size_t r = 0; r < xbar.rows(); ++r)
                for (std::size_t c = 0; c < xbar.cols(); ++c)
                    if (r != row || c != col)
                        reset_to_low(xbar.at(r, c), spec);
        }
        const double escalation = std::pow(spec.ceiling_escalation, round);
        for (int k = 0; k < spec.max_attempts; ++k) {
            const double ceiling = std::min(spec.i_start + k * spec.i_step, spec.i_stop) * escalation;
            const double before = check_current(d, spec);
            sweep(d, ceiling, spec);
            const double ratio = check_current(d, spec) / before;
            ++out.attempts_used;
            out.trace.emplace_back(ceiling, ratio);
            if (ratio >= spec.r_min_ratio) {
                out.status = FormingStatus::formed;
                reset_to_low(d, spec);
                return out;
            }
        }
    }

    // defective: frozen at whatever it conducts now
    out.status = FormingStatus::defective;
    if (!d.formed) {
        if (!d.stuck)
            d.conductance = std::clamp(d.pristine_conductance, d.g_min, d.g_max);
        d.formed = true;
    }
    d.stuck = true;
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> all_cells(const Crossbar& xbar)
{
    std::vector<std::pair<std::size_t, std::size_t>> t;
    for (std::size_t r = 0; r < xbar.rows(); ++r)
        for (std::size_t c = 0; c < xbar.cols(); ++c)
            t.emplace_back(r, c);
    return t;
}

FormingReport form_all(Crossbar& xbar, const std::vector<std::pair<std::size_t, std::size_t>>& targets,
                       const FormingSpec& spec)
{
    spec.validate();
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& t : targets) {
        if (t.first >= xbar.rows() || t.second >= xbar.cols())
            throw ConfigError("forming target out of range");
        if (!seen.insert(t).second)
            throw ConfigError("duplicate forming target");
    }
    FormingReport rep;
    rep.outcomes.reserve(targets.size());
    for (const auto& [r, c] : targets)
        rep.outcomes.push_back(form_device(xbar, r, c, spec));
    return rep;
}

void write_report_json(std::ostream& os, const FormingReport& report)
{
    nlohmann::ordered_json j;
    j["defective_fraction"] = report.defective_fraction();
    auto& arr = j["devices"] = nlohmann::ordered_json::array();
    for (const auto& o : report.outcomes) {
        nlohmann::ordered_json e;
        e["row"] = o.row;
        e["col"] = o.col;
        e["status"] = to_string(o.status);
        e["attempts"] = o.attempts_used;
        auto& tr = e["trace"] = nlohmann::ordered_json::array();
        for (const auto& [ceiling, ratio] : o.trace)
            tr.push_back({ceiling, ratio});
        arr.push_back(std::move(e));
    }
    os << j.dump(1) << '\n';
}

}  // namespace xbarsim
