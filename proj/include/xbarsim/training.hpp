#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "xbarsim/benchmark.hpp"
#include "xbarsim/crossbar.hpp"
#include "xbarsim/mlp.hpp"

namespace xbarsim {

struct TrainingConfig {
    // step on conductances expressed in microsiemens
    double learning_rate = 3.0;
    int epochs = 500;
    bool full_batch = true;
    Interval clip{10 * uS, 100 * uS};
    double g_bias = 55 * uS;
    // initial weights uniform in +-init_fraction of the largest representable weight
    double init_fraction = 0.1;
    // output-voltage targets: +target_level for the label, -target_level otherwise
    double target_level = 20.0;
    std::uint64_t seed = 0;

    void validate() const;
    double weight_limit() const { return clip.hi - clip.lo; }
};

struct NetworkPairs {
    ConductancePairMap layer1;
    ConductancePairMap layer2;
};

// Stuck conductances per pair cell, NaN where the device is healthy.
struct DefectMap {
    ConductancePairMap layer1;
    ConductancePairMap layer2;

    static DefectMap none();
    std::size_t count() const;
};

struct CurvePoint {
    int epoch = 0;
    double mse = 0.0;
    double fidelity = 0.0;
};

struct TrainingResult {
    NetworkPairs pairs;
    std::vector<CurvePoint> curve;
};

ConductancePairMap weights_to_pairs(const Eigen::MatrixXd& w, double g_bias, const Interval& clip, int layer = 1,
                                    std::size_t* clipped = nullptr);
Eigen::MatrixXd pairs_to_weights(const ConductancePairMap& map);

NetworkPairs initial_pairs(const TrainingConfig& cfg, const DefectMap* defects = nullptr);

struct Gradients {
    double mse = 0.0;
    // d mse / d G in 1/uS units, same layout as the pair maps
    ConductancePairMap layer1;
    ConductancePairMap layer2;
};

Gradients loss_and_gradients(const NetworkPairs& pairs, const Dataset& data, double target_level,
                             const NetworkTopology& topo = {});
double mse_loss(const NetworkPairs& pairs, const Dataset& data, double target_level,
                const NetworkTopology& topo = {});

TrainingResult train_ex_situ(const Dataset& data, const TrainingConfig& cfg, const DefectMap* defects = nullptr,
                             const NetworkTopology& topo = {});

double pairs_fidelity(const NetworkPairs& pairs, const Dataset& data, const NetworkTopology& topo = {});

struct ManhattanConfig {
    double amplitude = 1.3;
    double pulse_width = 500 * us;
    BiasKind bias = BiasKind::v_half;
    int epochs = 60;
    double v_read = 0.2;
    double target_level = 20.0;

    void validate() const;
};

struct InSituResult {
    std::vector<double> error;  // classification error measured at the start of each epoch
    std::vector<double> mse;
    double final_fidelity = 0.0;
    std::size_t pulses = 0;
    std::size_t disturbed = 0;
};

InSituResult train_in_situ_manhattan(Crossbar& xbar1, Crossbar& xbar2, const Dataset& data,
                                     const ManhattanConfig& cfg, const NetworkTopology& topo = {});

NetworkPairs read_back_pairs(const Crossbar& xbar1, const Crossbar& xbar2, double v_read = 0.2);

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve);

}  // namespace xbarsim
