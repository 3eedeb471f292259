#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "xbarsim/crossbar.hpp"

namespace xbarsim {

struct NetworkTopology {
    static constexpr std::size_t n_pixels = 16;
    static constexpr std::size_t n_inputs = 17;  // pixels + bias
    static constexpr std::size_t n_hidden = 10;
    static constexpr std::size_t n_hidden_aug = 11;  // hidden + bias
    static constexpr std::size_t n_outputs = 4;
    double input_level = 0.2;
    double bias_level = 0.2;
    double transimpedance_gain = 1e6;
    double hidden_saturation = 0.2;
    std::optional<double> output_rail;  // unclamped by default
};

// plus/minus are (inputs x neurons) in siemens.
struct ConductancePairMap {
    Eigen::MatrixXd plus;
    Eigen::MatrixXd minus;
    int layer = 1;

    std::size_t inputs() const { return static_cast<std::size_t>(plus.rows()); }
    std::size_t neurons() const { return static_cast<std::size_t>(plus.cols()); }
    void check() const;
};

// Interleaved crossbar grid: row 2j holds G+ of neuron j, row 2j+1 holds G-, columns are inputs.
Eigen::MatrixXd to_crossbar_grid(const ConductancePairMap& m, std::size_t rows, std::size_t cols);
ConductancePairMap from_crossbar_grid(const Eigen::MatrixXd& grid, std::size_t inputs, std::size_t neurons,
                                      int layer);

double neuron_hidden(double delta_current, const NetworkTopology& topo = {});
double neuron_output(double delta_current, const NetworkTopology& topo = {});

enum class Activation { hidden, output };

Eigen::VectorXd layer_forward(const ConductancePairMap& map, const Eigen::VectorXd& inputs, Activation act,
                              const NetworkTopology& topo = {});
// Crossbar variant: inputs drive the first inputs.size() columns (others at 0 V).
Eigen::VectorXd layer_forward(const Crossbar& xbar, std::size_t neurons, const Eigen::VectorXd& inputs,
                              Activation act, const NetworkTopology& topo = {});

using Pixels = std::array<int, NetworkTopology::n_pixels>;

Eigen::VectorXd encode_inputs(const Pixels& pixels, const NetworkTopology& topo = {});

struct Inference {
    std::size_t predicted = 0;
    Eigen::VectorXd outputs;
    Eigen::VectorXd hidden;
};

std::size_t argmax_lowest(const Eigen::VectorXd& v);

Inference infer(const ConductancePairMap& layer1, const ConductancePairMap& layer2, const Pixels& pixels,
                const NetworkTopology& topo = {});
Inference infer(const Crossbar& xbar1, const Crossbar& xbar2, const Pixels& pixels,
                const NetworkTopology& topo = {});

}  // namespace xbarsim
