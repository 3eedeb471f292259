#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xbarsim/pipeline.hpp"
#include "xbarsim/scaling.hpp"

namespace xbarsim {

// "50uS", "1.3V", "-1.8V", "180uA", "5.49Ohm", "500us". Bare numbers are rejected.
double parse_quantity(const std::string& text, const std::string& unit);

struct BenchmarkOptions {
    std::string train_file;  // empty: built-in canonical set
    std::string in_situ_classes = "AVT";
    std::vector<double> sweep_sigmas{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5};
    int sweep_runs = 100;
};

struct ScaleOptions {
    std::vector<long> ladder_lengths{1, 2, 5, 10, 20, 50, 70, 100, 200, 400, 500, 1000};
    std::vector<ScalingPreset> presets{experiment_like, copper};
    double set_v_min = 0.7, set_v_max = 1.3;
    double reset_v_min = 1.0, reset_v_max = 1.9;
    double g_third_set = xbarsim::g_third_set, g_third_reset = xbarsim::g_third_reset;
    double g_half_set = xbarsim::g_half_set, g_half_reset = xbarsim::g_half_reset;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    HardwareConfig hardware;
    // nullopt: every cell
    std::optional<std::vector<std::pair<std::size_t, std::size_t>>> forming_targets;
    TuningSpec tuning = [] {
        TuningSpec t;
        t.tolerance = 0.05;
        return t;
    }();
    TrainingConfig training;
    ManhattanConfig manhattan;
    BenchmarkOptions benchmark;
    ScaleOptions scale;
    std::string output_dir = "out";

    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

Dataset training_set(const ExperimentConfig& cfg);

}  // namespace xbarsim
