#include "xbarsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "xbarsim/errors.hpp"

namespace xbarsim {

using nlohmann::json;

double parse_quantity(const std::string& text, const std::string& unit)
{
    auto fail = [&] { throw ConfigError("expected a quantity in " + unit + ", got '" + text + "'"); };
    if (text.size() <= unit.size() || text.compare(text.size() - unit.size(), unit.size(), unit) != 0)
        fail();
    std::string num = text.substr(0, text.size() - unit.size());
    double scale = 1.0;
    // micro may be written u or the UTF-8 sign
    static const std::pair<const char*, double> prefixes[] = {
        {"\xC2\xB5", 1e-6}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"m", 1e-3}, {"k", 1e3}, {"M", 1e6}};
    for (const auto& [p, f] : prefixes) {
        const std::string ps(p);
        if (num.size() > ps.size() && num.compare(num.size() - ps.size(), ps.size(), ps) == 0) {
            const char before = num[num.size() - ps.size() - 1];
            if (std::isdigit(static_cast<unsigned char>(before)) || before == '.') {
                scale = f;
                num.resize(num.size() - ps.size());
                break;
            }
        }
    }
    if (num.empty() || num.find_first_of(" \t") != std::string::npos)
        fail();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(num, &used);
    } catch (const std::exception&) {
        fail();
    }
    if (used != num.size() || !std::isfinite(v))
        fail();
    return v * scale;
}

namespace {

// Strict object reader: every key must be consumed.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError(path_ + ": expected an object");
    }

    ~Section() noexcept(false)
    {
        if (std::uncaught_exceptions())
            return;
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
    }

    bool has(const std::string& k) const { return j_.contains(k); }
    const json& raw(const std::string& k)
    {
        used_.insert(k);
        return j_.at(k);
    }
    std::string where(const std::string& k) const { return path_ + "." + k; }

    void quantity(const std::string& k, const std::string& unit, double& out)
    {
        if (!has(k))
            return;
        const json& v = raw(k);
        if (!v.is_string())
            throw ConfigError(where(k) + ": needs a unit suffix (" + unit + ")");
        try {
            out = parse_quantity(v.get<std::string>(), unit);
        } catch (const ConfigError& e) {
            throw ConfigError(where(k) + ": " + e.what());
        }
    }

    void interval(const std::string& k, const std::string& unit, Interval& out)
    {
        if (!has(k))
            return;
        const json& v = raw(k);
        if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string())
            throw ConfigError(where(k) + ": expected [lo, hi] with units");
        out.lo = parse_quantity(v[0].get<std::string>(), unit);
        out.hi = parse_quantity(v[1].get<std::string>(), unit);
    }

    template <class T>
    void number(const std::string& k, T& out)
    {
        if (!has(k))
            return;
        const json& v = raw(k);
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean())
                throw ConfigError(where(k) + ": expected true/false");
            out = v.get<bool>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer())
                throw ConfigError(where(k) + ": expected an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.get<long long>() < 0)
                    throw ConfigError(where(k) + ": must be non-negative");
            }
            out = v.get<T>();
        } else {
            if (!v.is_number())
                throw ConfigError(where(k) + ": expected a plain number");
            out = v.get<T>();
        }
    }

    void text(const std::string& k, std::string& out)
    {
        if (!has(k))
            return;
        const json& v = raw(k);
        if (!v.is_string())
            throw ConfigError(where(k) + ": expected a string");
        out = v.get<std::string>();
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void read_device(Section s, DeviceVariationSpec& d)
{
    s.quantity("set_mu", "V", d.set_mu);
    s.quantity("set_sigma", "V", d.set_sigma);
    s.quantity("reset_mu", "V", d.reset_mu);
    s.quantity("reset_sigma", "V", d.reset_sigma);
    s.number("stuck_probability", d.stuck_probability);
    s.interval("stuck_conductance_range", "S", d.stuck_conductance_range);
    s.interval("g_init_range", "S", d.g_init_range);
    s.quantity("g_min", "S", d.g_min);
    s.quantity("g_max", "S", d.g_max);
    s.number("nonlinearity_alpha", d.nonlinearity_alpha);
    s.quantity("kinetics_rate", "S", d.kinetics_rate);
    s.number("kinetics_rate_log_sigma", d.kinetics_rate_log_sigma);
    s.quantity("kinetics_voltage_scale", "V", d.kinetics_voltage_scale);
    s.number("pristine", d.pristine);
    s.number("preformed_probability", d.preformed_probability);
    s.interval("pristine_conductance_range", "S", d.pristine_conductance_range);
    s.quantity("forming_current_mu", "A", d.forming_current_mu);
    s.quantity("forming_current_sigma", "A", d.forming_current_sigma);
}

LineModel line_model(const std::string& s)
{
    if (s == "ideal")
        return LineModel::ideal;
    if (s == "wire_resistive")
        return LineModel::wire_resistive;
    throw ConfigError("crossbar.line_model: expected ideal or wire_resistive");
}

BiasKind bias_kind(const std::string& s)
{
    if (s == "V_half")
        return BiasKind::v_half;
    if (s == "V_third")
        return BiasKind::v_third;
    throw ConfigError("bias: expected V_half or V_third");
}

void read_tuning(Section s, TuningSpec& t)
{
    s.number("tolerance", t.tolerance);
    s.quantity("v_read", "V", t.v_read);
    s.interval("set_amplitude_range", "V", t.set_amplitude_range);
    s.interval("reset_amplitude_range", "V", t.reset_amplitude_range);
    s.quantity("pulse_width", "s", t.pulse_width);
    s.number("max_pulses", t.max_pulses);
    s.quantity("amplitude_step", "V", t.amplitude_step);
    s.number("progress_fraction", t.progress_fraction);
}

}  // namespace

void ExperimentConfig::validate() const
{
    hardware.devices.validate();
    hardware.forming.validate();
    hardware.import_tuning.validate();
    tuning.validate();
    training.validate();
    manhattan.validate();
    if (hardware.rows < 2 * NetworkTopology::n_hidden || hardware.cols < NetworkTopology::n_inputs)
        throw ConfigError("crossbar: the network needs at least 20 rows and 17 columns");
    if (!(hardware.r_wire >= 0))
        throw ConfigError("crossbar: wire resistance must be non-negative");
    if (forming_targets) {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& t : *forming_targets) {
            if (t.first >= hardware.rows || t.second >= hardware.cols)
                throw ConfigError("forming.targets: cell out of range");
            if (!seen.insert(t).second)
                throw ConfigError("forming.targets: duplicate cell");
        }
    }
    if (benchmark.sweep_runs < 1)
        throw ConfigError("benchmark.sweep_runs must be at least 1");
    for (double s : benchmark.sweep_sigmas)
        if (!(s >= 0))
            throw ConfigError("benchmark.sweep_sigmas must be non-negative");
    for (char c : benchmark.in_situ_classes)
        class_index(c);
    for (long n : scale.ladder_lengths)
        if (n < 1)
            throw ConfigError("scale.ladder_lengths must be positive");
    for (const auto& p : scale.presets)
        if (!(p.r_w >= 0))
            throw ConfigError("scale.presets: R_w must be non-negative");
}

ExperimentConfig parse_config_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    ExperimentConfig c;
    try {
        Section root(j, "config");
        if (root.has("seed"))
            root.number("seed", c.seed);
        root.text("output_dir", c.output_dir);
        if (root.has("device"))
            read_device(Section(root.raw("device"), "device"), c.hardware.devices);
        if (root.has("crossbar")) {
            Section s(root.raw("crossbar"), "crossbar");
            s.number("rows", c.hardware.rows);
            s.number("cols", c.hardware.cols);
            s.quantity("wire_resistance", "Ohm", c.hardware.r_wire);
            std::string lm = "ideal";
            s.text("line_model", lm);
            c.hardware.line_model = line_model(lm);
        }
        if (root.has("forming")) {
            Section s(root.raw("forming"), "forming");
            auto& f = c.hardware.forming;
            s.quantity("i_start", "A", f.i_start);
            s.quantity("i_stop", "A", f.i_stop);
            s.quantity("i_step", "A", f.i_step);
            s.number("r_min_ratio", f.r_min_ratio);
            s.quantity("v_reset", "V", f.v_reset);
            s.quantity("r_th", "Ohm", f.r_th);
            s.number("max_attempts", f.max_attempts);
            s.number("max_rounds", f.max_rounds);
            s.number("ceiling_escalation", f.ceiling_escalation);
            s.quantity("g_low", "S", f.g_low);
            if (s.has("targets")) {
                const json& t = s.raw("targets");
                if (t.is_string() && t.get<std::string>() == "all") {
                    c.forming_targets.reset();
                } else if (t.is_array()) {
                    std::vector<std::pair<std::size_t, std::size_t>> v;
                    for (const auto& e : t) {
                        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned())
                            throw ConfigError("forming.targets: expected [[row, col], ...]");
                        v.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
                    }
                    c.forming_targets = std::move(v);
                } else {
                    throw ConfigError("forming.targets: expected \"all\" or a list of cells");
                }
            }
        }
        if (root.has("tuning"))
            read_tuning(Section(root.raw("tuning"), "tuning"), c.tuning);
        if (root.has("import"))
            read_tuning(Section(root.raw("import"), "import"), c.hardware.import_tuning);
        if (root.has("training")) {
            Section s(root.raw("training"), "training");
            auto& t = c.training;
            s.number("learning_rate", t.learning_rate);
            s.number("epochs", t.epochs);
            s.number("full_batch", t.full_batch);
            s.interval("clip", "S", t.clip);
            s.quantity("g_bias", "S", t.g_bias);
            s.number("init_fraction", t.init_fraction);
            s.quantity("target_level", "V", t.target_level);
        }
        if (root.has("manhattan")) {
            Section s(root.raw("manhattan"), "manhattan");
            auto& m = c.manhattan;
            s.quantity("amplitude", "V", m.amplitude);
            s.quantity("pulse_width", "s", m.pulse_width);
            std::string b = "V_half";
            s.text("bias", b);
            m.bias = bias_kind(b);
            s.number("epochs", m.epochs);
            s.quantity("target_level", "V", m.target_level);
        }
        if (root.has("benchmark")) {
            Section s(root.raw("benchmark"), "benchmark");
            auto& b = c.benchmark;
            s.text("train_file", b.train_file);
            s.text("in_situ_classes", b.in_situ_classes);
            if (s.has("sweep_sigmas")) {
                const json& v = s.raw("sweep_sigmas");
                if (!v.is_array())
                    throw ConfigError("benchmark.sweep_sigmas: expected a list of numbers");
                b.sweep_sigmas.clear();
                for (const auto& e : v) {
                    if (!e.is_number())
                        throw ConfigError("benchmark.sweep_sigmas: expected a list of numbers");
                    b.sweep_sigmas.push_back(e.get<double>());
                }
            }
            s.number("sweep_runs", b.sweep_runs);
        }
        if (root.has("scale")) {
            Section s(root.raw("scale"), "scale");
            auto& sc = c.scale;
            if (s.has("ladder_lengths")) {
                const json& v = s.raw("ladder_lengths");
                if (!v.is_array())
                    throw ConfigError("scale.ladder_lengths: expected a list of integers");
                sc.ladder_lengths.clear();
                for (const auto& e : v) {
                    if (!e.is_number_integer())
                        throw ConfigError("scale.ladder_lengths: expected a list of integers");
                    sc.ladder_lengths.push_back(e.get<long>());
                }
            }
            if (s.has("presets")) {
                const json& v = s.raw("presets");
                if (!v.is_array())
                    throw ConfigError("scale.presets: expected a list");
                sc.presets.clear();
                for (const auto& e : v) {
                    Section p(e, "scale.presets[]");
                    ScalingPreset pr;
                    p.text("name", pr.name);
                    p.quantity("wire_resistance", "Ohm", pr.r_w);
                    sc.presets.push_back(pr);
                }
            }
            s.quantity("set_v_min", "V", sc.set_v_min);
            s.quantity("set_v_max", "V", sc.set_v_max);
            s.quantity("reset_v_min", "V", sc.reset_v_min);
            s.quantity("reset_v_max", "V", sc.reset_v_max);
            s.quantity("g_third_set", "S", sc.g_third_set);
            s.quantity("g_third_reset", "S", sc.g_third_reset);
            s.quantity("g_half_set", "S", sc.g_half_set);
            s.quantity("g_half_reset", "S", sc.g_half_reset);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.training.seed = c.seed;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

Dataset training_set(const ExperimentConfig& cfg)
{
    return cfg.benchmark.train_file.empty() ? canonical_training_set() : read_patterns(cfg.benchmark.train_file);
}

}  // namespace xbarsim
