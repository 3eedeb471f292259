#include "xbarsim/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace xbarsim {

void ConductancePairMap::check() const
{
    if (plus.rows() != minus.rows() || plus.cols() != minus.cols())
        throw std::invalid_argument("pair map: plus/minus shapes differ");
}

Eigen::MatrixXd to_crossbar_grid(const ConductancePairMap& m, std::size_t rows, std::size_t cols)
{
    m.check();
    if (2 * m.neurons() > rows || m.inputs() > cols)
        throw std::invalid_argument("pair map does not fit the crossbar");
    Eigen::MatrixXd g = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                                                  std::nan(""));
    for (Eigen::Index j = 0; j < m.plus.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.plus.rows(); ++i) {
            g(2 * j, i) = m.plus(i, j);
            g(2 * j + 1, i) = m.minus(i, j);
        }
    }
    return g;
}

ConductancePairMap from_crossbar_grid(const Eigen::MatrixXd& grid, std::size_t inputs, std::size_t neurons,
                                      int layer)
{
    if (static_cast<std::size_t>(grid.rows()) < 2 * neurons || static_cast<std::size_t>(grid.cols()) < inputs)
        throw std::invalid_argument("grid too small for the pair map");
    ConductancePairMap m;
    m.layer = layer;
    const auto I = static_cast<Eigen::Index>(inputs);
    const auto J = static_cast<Eigen::Index>(neurons);
    m.plus.resize(I, J);
    m.minus.resize(I, J);
    for (Eigen::Index j = 0; j < J; ++j) {
        for (Eigen::Index i = 0; i < I; ++i) {
            m.plus(i, j) = grid(2 * j, i);
            m.minus(i, j) = grid(2 * j + 1, i);
        }
    }
    return m;
}

double neuron_hidden(double delta_current, const NetworkTopology& topo)
{
    return topo.hidden_saturation * std::tanh(topo.transimpedance_gain * delta_current);
}

double neuron_output(double delta_current, const NetworkTopology& topo)
{
    double v = topo.transimpedance_gain * delta_current;
    if (topo.output_rail)
        v = std::clamp(v, -*topo.output_rail, *topo.output_rail);
    return v;
}

namespace {

Eigen::VectorXd activate(const Eigen::VectorXd& delta, Activation act, const NetworkTopology& topo)
{
    Eigen::VectorXd out(delta.size());
    for (Eigen::Index j = 0; j < delta.size(); ++j)
        out[j] = act == Activation::hidden ? neuron_hidden(delta[j], topo) : neuron_output(delta[j], topo);
    return out;
}

}  // namespace

Eigen::VectorXd layer_forward(const ConductancePairMap& map, const Eigen::VectorXd& inputs, Activation act,
                              const NetworkTopology& topo)
{
    map.check();
    if (static_cast<std::size_t>(inputs.size()) != map.inputs())
        throw std::invalid_argument("layer input length mismatch");
    Eigen::VectorXd delta(map.plus.cols());
    for (Eigen::Index j = 0; j < map.plus.cols(); ++j) {
        double ip = 0.0, im = 0.0;
        for (Eigen::Index i = 0; i < inputs.size(); ++i) {
            ip += inputs[i] * map.plus(i, j);
            im += inputs[i] * map.minus(i, j);
        }
        delta[j] = ip - im;
    }
    return activate(delta, act, topo);
}

Eigen::VectorXd layer_forward(const Crossbar& xbar, std::size_t neurons, const Eigen::VectorXd& inputs,
                              Activation act, const NetworkTopology& topo)
{
    if (static_cast<std::size_t>(inputs.size()) > xbar.cols() || 2 * neurons > xbar.rows())
        throw std::invalid_argument("layer does not fit the crossbar");
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xbar.cols()));
    v.head(inputs.size()) = inputs;
    const Eigen::VectorXd rows = vmm(xbar, v);
    Eigen::VectorXd delta(static_cast<Eigen::Index>(neurons));
    for (Eigen::Index j = 0; j < delta.size(); ++j)
        delta[j] = rows[2 * j] - rows[2 * j + 1];
    return activate(delta, act, topo);
}

Eigen::VectorXd encode_inputs(const Pixels& pixels, const NetworkTopology& topo)
{
    Eigen::VectorXd x(static_cast<Eigen::Index>(NetworkTopology::n_inputs));
    for (std::size_t i = 0; i < NetworkTopology::n_pixels; ++i)
        x[static_cast<Eigen::Index>(i)] = pixels[i] ? topo.input_level : -topo.input_level;
    x[NetworkTopology::n_pixels] = topo.bias_level;
    return x;
}

std::size_t argmax_lowest(const Eigen::VectorXd& v)
{
    std::size_t best = 0;
    for (Eigen::Index k = 1; k < v.size(); ++k)
        if (v[k] > v[static_cast<Eigen::Index>(best)])
            best = static_cast<std::size_t>(k);
    return best;
}

namespace {

Eigen::VectorXd append_bias(const Eigen::VectorXd& h, const NetworkTopology& topo)
{
    Eigen::VectorXd a(h.size() + 1);
    a.head(h.size()) = h;
    a[h.size()] = topo.bias_level;
    return a;
}

}  // namespace

Inference infer(const ConductancePairMap& layer1, const ConductancePairMap& layer2, const Pixels& pixels,
                const NetworkTopology& topo)
{
    Inference r;
    r.hidden = layer_forward(layer1, encode_inputs(pixels, topo), Activation::hidden, topo);
    r.outputs = layer_forward(layer2, append_bias(r.hidden, topo), Activation::output, topo);
    r.predicted = argmax_lowest(r.outputs);
    return r;
}

Inference infer(const Crossbar& xbar1, const Crossbar& xbar2, const Pixels& pixels, const NetworkTopology& topo)
{
    Inference r;
    r.hidden = layer_forward(xbar1, NetworkTopology::n_hidden, encode_inputs(pixels, topo), Activation::hidden, topo);
    r.outputs = layer_forward(xbar2, NetworkTopology::n_outputs, append_bias(r.hidden, topo), Activation::output, topo);
    r.predicted = argmax_lowest(r.outputs);
    return r;
}

}  // namespace xbarsim
