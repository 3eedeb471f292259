#include "xbarsim/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "xbarsim/errors.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

namespace {

constexpr double to_uS = 1e6;

Eigen::MatrixXd nan_matrix(std::size_t r, std::size_t c)
{
    return Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c),
                                     std::numeric_limits<double>::quiet_NaN());
}

Eigen::MatrixXd input_matrix(const Dataset& data, const NetworkTopology& topo)
{
    Eigen::MatrixXd x(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(NetworkTopology::n_inputs));
    for (std::size_t p = 0; p < data.size(); ++p)
        x.row(static_cast<Eigen::Index>(p)) = encode_inputs(data[p].pixels, topo).transpose();
    return x;
}

Eigen::MatrixXd target_matrix(const Dataset& data, double level)
{
    Eigen::MatrixXd t = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(data.size()),
                                                  static_cast<Eigen::Index>(NetworkTopology::n_outputs), -level);
    for (std::size_t p = 0; p < data.size(); ++p)
        t(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(data[p].label)) = level;
    return t;
}

struct Forward {
    Eigen::MatrixXd a1;     // pre-activation, N x 10
    Eigen::MatrixXd h_aug;  // N x 11
    Eigen::MatrixXd out;    // N x 4
};

// weights in uS; gain converts uS*V into the neuron input units
Forward forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2,
                const NetworkTopology& topo)
{
    const double g = topo.transimpedance_gain / to_uS;
    Forward f;
    f.a1 = g * (x * w1);
    f.h_aug.resize(x.rows(), w1.cols() + 1);
    f.h_aug.leftCols(w1.cols()) = topo.hidden_saturation * f.a1.array().tanh();
    f.h_aug.col(w1.cols()).setConstant(topo.bias_level);
    f.out = g * (f.h_aug * w2);
    return f;
}

}  // namespace

void TrainingConfig::validate() const
{
    if (!(learning_rate > 0) || !std::isfinite(learning_rate))
        throw ConfigError("training: learning rate must be positive");
    if (epochs < 0)
        throw ConfigError("training: epochs must be non-negative");
    if (!(clip.lo > 0) || !(clip.lo < clip.hi))
        throw ConfigError("training: clip interval must be positive and ordered");
    if (!clip.contains(g_bias))
        throw ConfigError("training: G_bias outside the clip interval");
    if (!(init_fraction >= 0 && init_fraction <= 1))
        throw ConfigError("training: init fraction outside [0,1]");
    if (!(target_level > 0))
        throw ConfigError("training: target level must be positive");
    if (!full_batch)
        throw ConfigError("training: only full-batch mode is implemented");
}

void ManhattanConfig::validate() const
{
    if (!(amplitude > 0) || !(pulse_width > 0) || epochs < 0 || v_read == 0.0 || !(target_level > 0))
        throw ConfigError("manhattan: invalid configuration");
}

DefectMap DefectMap::none()
{
    DefectMap d;
    d.layer1 = {nan_matrix(NetworkTopology::n_inputs, NetworkTopology::n_hidden),
                nan_matrix(NetworkTopology::n_inputs, NetworkTopology::n_hidden), 1};
    d.layer2 = {nan_matrix(NetworkTopology::n_hidden_aug, NetworkTopology::n_outputs),
                nan_matrix(NetworkTopology::n_hidden_aug, NetworkTopology::n_outputs), 2};
    return d;
}

std::size_t DefectMap::count() const
{
    std::size_t n = 0;
    for (const auto* m : {&layer1.plus, &layer1.minus, &layer2.plus, &layer2.minus})
        n += static_cast<std::size_t>((m->array() == m->array()).count());
    return n;
}

ConductancePairMap weights_to_pairs(const Eigen::MatrixXd& w, double g_bias, const Interval& clip, int layer,
                                    std::size_t* clipped)
{
    ConductancePairMap m;
    m.layer = layer;
    m.plus.resize(w.rows(), w.cols());
    m.minus.resize(w.rows(), w.cols());
    std::size_t n = 0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        const double p = g_bias + w(i) / 2.0;
        const double q = g_bias - w(i) / 2.0;
        m.plus(i) = clip.clamp(p);
        m.minus(i) = clip.clamp(q);
        if (m.plus(i) != p || m.minus(i) != q)
            ++n;
    }
    if (clipped)
        *clipped = n;
    return m;
}

Eigen::MatrixXd pairs_to_weights(const ConductancePairMap& map)
{
    map.check();
    return map.plus - map.minus;
}

NetworkPairs initial_pairs(const TrainingConfig& cfg, const DefectMap* defects)
{
    cfg.validate();
    Rng rng(derive_seed(cfg.seed, "training-init"));
    const double a = cfg.init_fraction * cfg.weight_limit();
    auto layer = [&](std::size_t in, std::size_t out, int tag, const ConductancePairMap* stuck) {
        Eigen::MatrixXd w(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w(i) = rng.uniform(-a, a);
        ConductancePairMap m = weights_to_pairs(w, cfg.g_bias, cfg.clip, tag);
        if (stuck) {
            // stuck devices keep their value; the healthy partner starts where the pair encodes w
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                const bool sp = !std::isnan(stuck->plus(i));
                const bool sm = !std::isnan(stuck->minus(i));
                if (sp)
                    m.plus(i) = stuck->plus(i);
                if (sm)
                    m.minus(i) = stuck->minus(i);
                if (sp && !sm)
                    m.minus(i) = cfg.clip.clamp(m.plus(i) - w(i));
                if (sm && !sp)
                    m.plus(i) = cfg.clip.clamp(m.minus(i) + w(i));
            }
        }
        return m;
    };
    NetworkPairs p;
    p.layer1 = layer(NetworkTopology::n_inputs, NetworkTopology::n_hidden, 1, defects ? &defects->layer1 : nullptr);
    p.layer2 = layer(NetworkTopology::n_hidden_aug, NetworkTopology::n_outputs, 2,
                     defects ? &defects->layer2 : nullptr);
    return p;
}

Gradients loss_and_gradients(const NetworkPairs& pairs, const Dataset& data, double target_level,
                             const NetworkTopology& topo)
{
    if (data.empty())
        throw std::invalid_argument("empty dataset");
    const Eigen::MatrixXd x = input_matrix(data, topo);
    const Eigen::MatrixXd t = target_matrix(data, target_level);
    const Eigen::MatrixXd w1 = pairs_to_weights(pairs.layer1) * to_uS;
    const Eigen::MatrixXd w2 = pairs_to_weights(pairs.layer2) * to_uS;
    const Forward f = forward(x, w1, w2, topo);
    const double g = topo.transimpedance_gain / to_uS;

    const Eigen::MatrixXd e = f.out - t;
    Gradients gr;
    gr.mse = e.squaredNorm() / static_cast<double>(e.size());
    const Eigen::MatrixXd dout = 2.0 * e / static_cast<double>(e.size());
    const Eigen::MatrixXd dw2 = g * (f.h_aug.transpose() * dout);
    const auto H = static_cast<Eigen::Index>(NetworkTopology::n_hidden);
    const Eigen::MatrixXd dh = g * (dout * w2.topRows(H).transpose());
    const Eigen::ArrayXXd th = f.a1.array().tanh();
    const Eigen::MatrixXd da1 = (dh.array() * topo.hidden_saturation * (1.0 - th * th)).matrix();
    const Eigen::MatrixXd dw1 = g * (x.transpose() * da1);

    gr.layer1 = {dw1, -dw1, 1};
    gr.layer2 = {dw2, -dw2, 2};
    return gr;
}

double mse_loss(const NetworkPairs& pairs, const Dataset& data, double target_level, const NetworkTopology& topo)
{
    const Eigen::MatrixXd x = input_matrix(data, topo);
    const Eigen::MatrixXd t = target_matrix(data, target_level);
    const Forward f =
        forward(x, pairs_to_weights(pairs.layer1) * to_uS, pairs_to_weights(pairs.layer2) * to_uS, topo);
    return (f.out - t).squaredNorm() / static_cast<double>(t.size());
}

double pairs_fidelity(const NetworkPairs& pairs, const Dataset& data, const NetworkTopology& topo)
{
    if (data.empty())
        return 0.0;
    std::size_t ok = 0;
    for (const auto& p : data)
        ok += infer(pairs.layer1, pairs.layer2, p.pixels, topo).predicted == p.label;
    return static_cast<double>(ok) / static_cast<double>(data.size());
}

namespace {

void descend(ConductancePairMap& m, const ConductancePairMap& grad, const ConductancePairMap* stuck, double lr,
             const Interval& clip)
{
    for (Eigen::Index i = 0; i < m.plus.size(); ++i) {
        if (!stuck || std::isnan(stuck->plus(i)))
            m.plus(i) = clip.clamp(m.plus(i) - lr * grad.plus(i));
        if (!stuck || std::isnan(stuck->minus(i)))
            m.minus(i) = clip.clamp(m.minus(i) - lr * grad.minus(i));
    }
}

}  // namespace

TrainingResult train_ex_situ(const Dataset& data, const TrainingConfig& cfg, const DefectMap* defects,
                             const NetworkTopology& topo)
{
    cfg.validate();
    if (data.empty())
        throw std::invalid_argument("empty dataset");
    TrainingResult res;
    res.pairs = initial_pairs(cfg, defects);
    // gradients are per uS and the step is in uS; pair maps hold siemens
    const double lr = cfg.learning_rate / to_uS;
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        const Gradients gr = loss_and_gradients(res.pairs, data, cfg.target_level, topo);
        if (!std::isfinite(gr.mse))
            throw DivergenceError("training diverged at epoch " + std::to_string(ep));
        res.curve.push_back({ep, gr.mse, pairs_fidelity(res.pairs, data, topo)});
        descend(res.pairs.layer1, gr.layer1, defects ? &defects->layer1 : nullptr, lr, cfg.clip);
        descend(res.pairs.layer2, gr.layer2, defects ? &defects->layer2 : nullptr, lr, cfg.clip);
    }
    const double mse = mse_loss(res.pairs, data, cfg.target_level, topo);
    if (!std::isfinite(mse))
        throw DivergenceError("training diverged");
    res.curve.push_back({cfg.epochs, mse, pairs_fidelity(res.pairs, data, topo)});
    return res;
}

NetworkPairs read_back_pairs(const Crossbar& xbar1, const Crossbar& xbar2, double v_read)
{
    NetworkPairs p;
    p.layer1 = from_crossbar_grid(xbar1.read_back(v_read), NetworkTopology::n_inputs, NetworkTopology::n_hidden, 1);
    p.layer2 =
        from_crossbar_grid(xbar2.read_back(v_read), NetworkTopology::n_hidden_aug, NetworkTopology::n_outputs, 2);
    return p;
}

namespace {

// Two-step row update for one layer; sign > 0 means the weight should grow.
void manhattan_layer(Crossbar& xbar, const Eigen::MatrixXd& dw, const ManhattanConfig& cfg, InSituResult& res)
{
    const std::size_t inputs = static_cast<std::size_t>(dw.rows());
    for (Eigen::Index j = 0; j < dw.cols(); ++j) {
        for (int side = 0; side < 2; ++side) {
            const std::size_t row = static_cast<std::size_t>(2 * j + side);
            std::vector<bool> up(xbar.cols(), false), down(xbar.cols(), false);
            for (std::size_t i = 0; i < inputs; ++i) {
                const double gsign = dw(static_cast<Eigen::Index>(i), j);
                if (gsign == 0.0)
                    continue;
                // G+ follows the weight, G- opposes it
                const bool grow_weight = gsign < 0.0;
                const bool grow_device = side == 0 ? grow_weight : !grow_weight;
                (grow_device ? up : down)[i] = true;
            }
            for (const auto& [sel, amp] : {std::pair{&up, cfg.amplitude}, std::pair{&down, -cfg.amplitude}}) {
                const auto rep = apply_row_pulses(xbar, row, *sel, amp, cfg.pulse_width, cfg.bias);
                res.pulses += rep.pulsed;
                res.disturbed += rep.disturbed;
            }
        }
    }
}

double hardware_fidelity(const Crossbar& x1, const Crossbar& x2, const Dataset& data, const NetworkTopology& topo)
{
    std::size_t ok = 0;
    for (const auto& p : data)
        ok += infer(x1, x2, p.pixels, topo).predicted == p.label;
    return static_cast<double>(ok) / static_cast<double>(data.size());
}

}  // namespace

InSituResult train_in_situ_manhattan(Crossbar& xbar1, Crossbar& xbar2, const Dataset& data,
                                     const ManhattanConfig& cfg, const NetworkTopology& topo)
{
    cfg.validate();
    if (data.empty())
        throw std::invalid_argument("empty dataset");
    InSituResult res;
    for (int ep = 0; ep < cfg.epochs; ++ep) {
        res.error.push_back(1.0 - hardware_fidelity(xbar1, xbar2, data, topo));
        const NetworkPairs seen = read_back_pairs(xbar1, xbar2, cfg.v_read);
        const Gradients gr = loss_and_gradients(seen, data, cfg.target_level, topo);
        res.mse.push_back(gr.mse);
        manhattan_layer(xbar1, gr.layer1.plus, cfg, res);
        manhattan_layer(xbar2, gr.layer2.plus, cfg, res);
    }
    res.final_fidelity = hardware_fidelity(xbar1, xbar2, data, topo);
    return res;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& curve)
{
    char buf[96];
    os << "epoch,mse,fidelity\n";
    for (const auto& c : curve) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g\n", c.epoch, c.mse, c.fidelity);
        os << buf;
    }
}

}  // namespace xbarsim
