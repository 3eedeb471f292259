// Experiment runner: form, tune, train, infer, sweep, scale.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "xbarsim/benchmark.hpp"
#include "xbarsim/config.hpp"
#include "xbarsim/errors.hpp"
#include "xbarsim/forming.hpp"
#include "xbarsim/pipeline.hpp"
#include "xbarsim/rng.hpp"
#include "xbarsim/scaling.hpp"
#include "xbarsim/training.hpp"
#include "xbarsim/tuning.hpp"

namespace fs = std::filesystem;
using namespace xbarsim;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int exit_config = 2;
constexpr int exit_diverged = 3;

struct Options {
    std::string config;
    std::string out;
    long long seed = -1;
    std::string mode = "oblivious";
    std::string target;
    int crossbar = 1;
    std::string patterns;
    std::string source = "hardware";
};

ExperimentConfig load(const Options& o)
{
    ExperimentConfig c = o.config.empty() ? parse_config_text("{}") : load_config(o.config);
    if (o.seed >= 0) {
        c.seed = static_cast<std::uint64_t>(o.seed);
        c.training.seed = c.seed;
    }
    if (!o.out.empty())
        c.output_dir = o.out;
    return c;
}

fs::path out_dir(const ExperimentConfig& c)
{
    fs::path p(c.output_dir);
    fs::create_directories(p);
    return p;
}

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os)
        throw std::runtime_error("cannot write " + p.string());
    return os;
}

void require_file(const fs::path& p, const char* what)
{
    if (!fs::exists(p))
        throw ConfigError(std::string("missing ") + what + ": " + p.string());
}

std::string fmt9(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

fs::path snapshot_path(const fs::path& dir, int k)
{
    return dir / ("crossbar" + std::to_string(k) + ".snapshot");
}

int cmd_form(const Options& o)
{
    const ExperimentConfig c = load(o);
    const fs::path dir = out_dir(c);
    ojson rep;
    rep["crossbars"] = ojson::array();
    for (int k = 1; k <= 2; ++k) {
        Crossbar x = build_crossbar(c.hardware.rows, c.hardware.cols, c.hardware.devices, c.hardware.r_wire,
                                    derive_seed(c.seed, "device", static_cast<std::uint64_t>(k)));
        x.set_line_model(c.hardware.line_model, c.hardware.r_wire);
        const auto targets = c.forming_targets ? *c.forming_targets : all_cells(x);
        const FormingReport r = form_all(x, targets, c.hardware.forming);
        std::ostringstream ss;
        write_report_json(ss, r);
        rep["crossbars"].push_back(ojson::parse(ss.str()));
        write_snapshot(snapshot_path(dir, k).string(), x);
        write_grid_csv((dir / ("crossbar" + std::to_string(k) + "_conductance.csv")).string(), x.read_back());
    }
    auto os = open_out(dir / "forming_report.json");
    os << rep.dump(1) << '\n';
    return 0;
}

// Targets may be smaller than the crossbar; the rest is left untouched.
Eigen::MatrixXd pad_targets(const Eigen::MatrixXd& t, const Crossbar& x)
{
    if (static_cast<std::size_t>(t.rows()) > x.rows() || static_cast<std::size_t>(t.cols()) > x.cols())
        throw ConfigError("target grid larger than the crossbar");
    Eigen::MatrixXd g = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(x.rows()),
                                                  static_cast<Eigen::Index>(x.cols()), std::nan(""));
    g.topLeftCorner(t.rows(), t.cols()) = t;
    return g;
}

int cmd_tune(const Options& o)
{
    ExperimentConfig c = load(o);
    if (o.target.empty())
        throw ConfigError("tune needs --target");
    if (o.crossbar != 1 && o.crossbar != 2)
        throw ConfigError("--crossbar must be 1 or 2");
    const Eigen::MatrixXd targets = read_grid_csv(o.target);
    const fs::path dir(c.output_dir);
    const fs::path snap = snapshot_path(dir, o.crossbar);
    require_file(snap, "crossbar snapshot (run form first)");
    Crossbar x = read_snapshot(snap.string());
    const Eigen::MatrixXd grid = pad_targets(targets, x);
    const ImportResult r = import_conductance_map(x, grid, c.tuning, true);

    write_snapshot(snap.string(), x);
    const std::string tag = "crossbar" + std::to_string(o.crossbar);
    write_grid_csv((dir / (tag + "_tuning_error.csv")).string(), r.errors.topLeftCorner(targets.rows(), targets.cols()));
    write_grid_csv((dir / (tag + "_conductance.csv")).string(), x.read_back());
    std::vector<double> errs;
    for (Eigen::Index i = 0; i < r.errors.size(); ++i) {
        const auto rr = static_cast<std::size_t>(i % r.errors.rows());
        const auto cc = static_cast<std::size_t>(i / r.errors.rows());
        if (!std::isnan(r.errors(i)) && !x.at(rr, cc).stuck)
            errs.push_back(r.errors(i));
    }
    const Histogram h = error_histogram(errs, c.tuning.tolerance / 10.0, c.tuning.tolerance);
    auto os = open_out(dir / (tag + "_tuning_histogram.json"));
    write_histogram_json(os, h);
    if (r.non_converged) {
        std::cerr << r.non_converged << " device(s) did not converge\n";
        return exit_diverged;
    }
    return 0;
}

void write_pairs(const fs::path& dir, const NetworkPairs& p)
{
    write_grid_csv((dir / "layer1_pairs.csv").string(),
                   to_crossbar_grid(p.layer1, 2 * NetworkTopology::n_hidden, NetworkTopology::n_inputs));
    write_grid_csv((dir / "layer2_pairs.csv").string(),
                   to_crossbar_grid(p.layer2, 2 * NetworkTopology::n_outputs, NetworkTopology::n_hidden_aug));
}

NetworkPairs read_pairs(const fs::path& dir)
{
    require_file(dir / "layer1_pairs.csv", "trained weights (run train first)");
    require_file(dir / "layer2_pairs.csv", "trained weights (run train first)");
    NetworkPairs p;
    p.layer1 = from_crossbar_grid(read_grid_csv((dir / "layer1_pairs.csv").string()), NetworkTopology::n_inputs,
                                  NetworkTopology::n_hidden, 1);
    p.layer2 = from_crossbar_grid(read_grid_csv((dir / "layer2_pairs.csv").string()), NetworkTopology::n_hidden_aug,
                                  NetworkTopology::n_outputs, 2);
    return p;
}

int cmd_train(const Options& o)
{
    const ExperimentConfig c = load(o);
    if (o.mode != "oblivious" && o.mode != "aware" && o.mode != "in-situ")
        throw ConfigError("--mode must be oblivious, aware or in-situ");
    const Dataset train = training_set(c);
    const Dataset test = generate_test_set(train);
    const fs::path dir(c.output_dir);
    ojson summary;
    summary["mode"] = o.mode;

    if (o.mode == "in-situ") {
        require_file(snapshot_path(dir, 1), "crossbar snapshot (run form first)");
        require_file(snapshot_path(dir, 2), "crossbar snapshot (run form first)");
        Crossbar x1 = read_snapshot(snapshot_path(dir, 1).string());
        Crossbar x2 = read_snapshot(snapshot_path(dir, 2).string());
        const Dataset subset = select_classes(train, c.benchmark.in_situ_classes);
        const InSituResult r = train_in_situ_manhattan(x1, x2, subset, c.manhattan);
        std::vector<CurvePoint> curve;
        for (std::size_t e = 0; e < r.error.size(); ++e)
            curve.push_back({static_cast<int>(e), r.mse[e], 1.0 - r.error[e]});
        curve.push_back({static_cast<int>(r.error.size()),
                         mse_loss(read_back_pairs(x1, x2), subset, c.manhattan.target_level),
                         r.final_fidelity});
        auto os = open_out(dir / "curve.csv");
        write_curve_csv(os, curve);
        write_snapshot(snapshot_path(dir, 1).string(), x1);
        write_snapshot(snapshot_path(dir, 2).string(), x2);
        summary["classes"] = c.benchmark.in_situ_classes;
        summary["final_train_fidelity"] = r.final_fidelity;
        summary["pulses"] = r.pulses;
        summary["half_select_disturbs"] = r.disturbed;
    } else {
        DefectMap defects = DefectMap::none();
        const bool aware = o.mode == "aware";
        if (aware) {
            require_file(snapshot_path(dir, 1), "crossbar snapshot (run form first)");
            require_file(snapshot_path(dir, 2), "crossbar snapshot (run form first)");
            defects = defect_map(read_snapshot(snapshot_path(dir, 1).string()),
                                 read_snapshot(snapshot_path(dir, 2).string()));
        }
        TrainingResult r;
        try {
            r = train_ex_situ(train, c.training, aware ? &defects : nullptr);
        } catch (const DivergenceError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return exit_diverged;
        }
        fs::create_directories(dir);
        write_pairs(dir, r.pairs);
        auto os = open_out(dir / "curve.csv");
        write_curve_csv(os, r.curve);
        summary["stuck_cells"] = defects.count();
        summary["train_fidelity"] = pairs_fidelity(r.pairs, train);
        summary["test_fidelity"] = pairs_fidelity(r.pairs, test);
    }
    fs::create_directories(dir);
    auto os = open_out(dir / ("train_" + o.mode + ".json"));
    os << summary.dump(1) << '\n';
    return 0;
}

int cmd_infer(const Options& o)
{
    const ExperimentConfig c = load(o);
    if (o.source != "hardware" && o.source != "weights")
        throw ConfigError("--source must be hardware or weights");
    const Dataset data = o.patterns.empty() ? training_set(c) : read_patterns(o.patterns);
    const fs::path dir(c.output_dir);
    std::function<Inference(const Pixels&)> run;
    std::optional<Crossbar> x1, x2;
    NetworkPairs pairs;
    if (o.source == "hardware") {
        require_file(snapshot_path(dir, 1), "crossbar snapshot");
        require_file(snapshot_path(dir, 2), "crossbar snapshot");
        x1 = read_snapshot(snapshot_path(dir, 1).string());
        x2 = read_snapshot(snapshot_path(dir, 2).string());
        run = [&](const Pixels& px) { return infer(*x1, *x2, px); };
    } else {
        pairs = read_pairs(dir);
        run = [&](const Pixels& px) { return infer(pairs.layer1, pairs.layer2, px); };
    }
    auto os = open_out(dir / "inference.csv");
    os << "pattern,v0,v1,v2,v3,predicted,label\n";
    std::size_t ok = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Inference r = run(data[i].pixels);
        os << i;
        for (Eigen::Index k = 0; k < r.outputs.size(); ++k)
            os << ',' << fmt9(r.outputs[k]);
        os << ',' << class_letters[r.predicted] << ',' << class_letters[data[i].label] << '\n';
        ok += r.predicted == data[i].label;
    }
    ojson s;
    s["source"] = o.source;
    s["patterns"] = data.size();
    s["fidelity"] = data.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(data.size());
    auto ss = open_out(dir / "inference_summary.json");
    ss << s.dump(1) << '\n';
    return 0;
}

// Best single-layer fidelity reachable by MSE gradient descent (16 + bias -> 4, linear outputs).
std::pair<double, double> single_layer_fidelity(const Dataset& train, const Dataset& test)
{
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(NetworkTopology::n_inputs, n_classes);
    auto x_of = [](const Pattern& p) { return encode_inputs(p.pixels) / 0.2; };
    auto fid = [&](const Dataset& d) {
        std::size_t ok = 0;
        for (const auto& p : d)
            ok += argmax_lowest(w.transpose() * x_of(p)) == p.label;
        return static_cast<double>(ok) / static_cast<double>(d.size());
    };
    double best = 0.0, best_test = 0.0;
    for (int ep = 0; ep < 2000; ++ep) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(w.rows(), w.cols());
        for (const auto& p : train) {
            const Eigen::VectorXd x = x_of(p);
            Eigen::VectorXd t = Eigen::VectorXd::Constant(n_classes, -1.0);
            t[static_cast<Eigen::Index>(p.label)] = 1.0;
            g += x * (w.transpose() * x - t).transpose();
        }
        w -= 0.01 / static_cast<double>(train.size()) * g;
        const double f = fid(train);
        if (f > best) {
            best = f;
            best_test = fid(test);
        }
    }
    return {best, best_test};
}

int cmd_sweep(const Options& o)
{
    const ExperimentConfig c = load(o);
    const fs::path dir(c.output_dir);
    const NetworkPairs p = read_pairs(dir);
    const Dataset train = training_set(c);
    const Dataset test = generate_test_set(train);
    const SweepStats st = precision_sweep(pairs_to_weights(p.layer1), pairs_to_weights(p.layer2),
                                          c.benchmark.sweep_sigmas, c.benchmark.sweep_runs, c.seed, train, test,
                                          c.training.weight_limit());
    {
        auto os = open_out(dir / "sweep_train.csv");
        write_sweep_csv(os, st.train);
    }
    {
        auto os = open_out(dir / "sweep_test.csv");
        write_sweep_csv(os, st.test);
    }
    const auto [sl_train, sl_test] = single_layer_fidelity(train, test);
    auto os = open_out(dir / "single_layer_vs_mlp.csv");
    os << "model,linearly_separable,train_fidelity,test_fidelity\n";
    const bool sep = linear_separability_check(train);
    os << "single_layer," << (sep ? "yes" : "no") << ',' << fmt9(sl_train) << ',' << fmt9(sl_test) << '\n';
    os << "mlp_10_hidden," << (sep ? "yes" : "no") << ',' << fmt9(pairs_fidelity(p, train)) << ','
       << fmt9(pairs_fidelity(p, test)) << '\n';
    return 0;
}

int cmd_scale(const Options& o)
{
    const ExperimentConfig c = load(o);
    const fs::path dir = out_dir(c);
    const auto& s = c.scale;
    {
        auto os = open_out(dir / "ladder_drop.csv");
        os << "preset,r_w_ohm,g_siemens,n,drop\n";
        for (const auto& p : s.presets)
            for (double g : {s.g_third_set, s.g_third_reset})
                for (long n : s.ladder_lengths)
                    os << p.name << ',' << fmt9(p.r_w) << ',' << fmt9(g) << ',' << n << ','
                       << fmt9(ladder_worst_case_drop(n, p.r_w, g)) << '\n';
    }
    auto os = open_out(dir / "max_dimension.csv");
    os << "preset,transition,bias,budget,n_max,diagnostic\n";
    bool empty_window = false;
    for (const auto& p : s.presets) {
        struct Row {
            const char* transition;
            const char* bias_name;
            BiasKind bias;
            double vmin, vmax, g;
        };
        const Row rows[] = {{"set", "V/3", BiasKind::v_third, s.set_v_min, s.set_v_max, s.g_third_set},
                            {"reset", "V/3", BiasKind::v_third, s.reset_v_min, s.reset_v_max, s.g_third_reset},
                            {"set", "V/2", BiasKind::v_half, s.set_v_min, s.set_v_max, s.g_half_set},
                            {"reset", "V/2", BiasKind::v_half, s.reset_v_min, s.reset_v_max, s.g_half_reset}};
        for (const auto& r : rows) {
            const DimensionResult d = max_crossbar_dimension(r.vmin, r.vmax, r.g, p.r_w, r.bias);
            empty_window = empty_window || !d.diagnostic.empty();
            os << p.name << ',' << r.transition << ',' << r.bias_name << ',' << fmt9(d.budget) << ',' << d.n_max
               << ',' << d.diagnostic << '\n';
        }
    }
    if (empty_window)
        std::cerr << "warning: some rows have no safe write window (see diagnostic column)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Behavioral simulator of passive memristive crossbar perceptrons"};
    app.require_subcommand(1);
    Options o;
    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config, "experiment configuration (JSON with unit-suffixed quantities)");
        sub->add_option("--out", o.out, "output directory (overrides output_dir)");
        sub->add_option("--seed", o.seed, "root seed override")->check(CLI::NonNegativeNumber);
    };
    auto* form = app.add_subcommand("form", "form every target device of both crossbars");
    common(form);
    auto* tune = app.add_subcommand("tune", "write-and-verify a target conductance grid into a crossbar");
    common(tune);
    tune->add_option("--target", o.target, "target grid CSV (siemens)")->required();
    tune->add_option("--crossbar", o.crossbar, "crossbar index (1 or 2)");
    auto* train = app.add_subcommand("train", "ex-situ or in-situ training");
    common(train);
    train->add_option("--mode", o.mode, "oblivious | aware | in-situ");
    auto* inf = app.add_subcommand("infer", "classify patterns");
    common(inf);
    inf->add_option("--patterns", o.patterns, "pattern file (default: training set)");
    inf->add_option("--source", o.source, "hardware (crossbar snapshots) | weights (pair CSVs)");
    auto* sweep = app.add_subcommand("sweep", "weight-import precision Monte Carlo");
    common(sweep);
    auto* scale = app.add_subcommand("scale", "ladder drop curves and maximum crossbar dimensions");
    common(scale);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }
    try {
        if (*form)
            return cmd_form(o);
        if (*tune)
            return cmd_tune(o);
        if (*train)
            return cmd_train(o);
        if (*inf)
            return cmd_infer(o);
        if (*sweep)
            return cmd_sweep(o);
        if (*scale)
            return cmd_scale(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_diverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
