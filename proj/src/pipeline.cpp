#include "xbarsim/pipeline.hpp"

#include "xbarsim/rng.hpp"

namespace xbarsim {

double Hardware::defective_fraction() const
{
    const double n1 = static_cast<double>(report1.outcomes.size());
    const double n2 = static_cast<double>(report2.outcomes.size());
    if (n1 + n2 == 0)
        return 0.0;
    return (report1.defective_fraction() * n1 + report2.defective_fraction() * n2) / (n1 + n2);
}

Hardware fabricate(const HardwareConfig& cfg, std::uint64_t seed)
{
    Crossbar x1 = build_crossbar(cfg.rows, cfg.cols, cfg.devices, cfg.r_wire, derive_seed(seed, "device", 1));
    Crossbar x2 = build_crossbar(cfg.rows, cfg.cols, cfg.devices, cfg.r_wire, derive_seed(seed, "device", 2));
    x1.set_line_model(cfg.line_model, cfg.r_wire);
    x2.set_line_model(cfg.line_model, cfg.r_wire);
    FormingReport r1 = form_all(x1, all_cells(x1), cfg.forming);
    FormingReport r2 = form_all(x2, all_cells(x2), cfg.forming);
    return {std::move(x1), std::move(x2), std::move(r1), std::move(r2)};
}

DefectMap defect_map(const Crossbar& xbar1, const Crossbar& xbar2, double v_read)
{
    DefectMap d = DefectMap::none();
    auto fill = [v_read](const Crossbar& x, ConductancePairMap& m) {
        for (Eigen::Index j = 0; j < m.plus.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.plus.rows(); ++i) {
                const auto& p = x.at(static_cast<std::size_t>(2 * j), static_cast<std::size_t>(i));
                const auto& q = x.at(static_cast<std::size_t>(2 * j + 1), static_cast<std::size_t>(i));
                if (p.stuck)
                    m.plus(i, j) = read_conductance(p, v_read);
                if (q.stuck)
                    m.minus(i, j) = read_conductance(q, v_read);
            }
        }
    };
    fill(xbar1, d.layer1);
    fill(xbar2, d.layer2);
    return d;
}

NetworkImport import_network(Crossbar& xbar1, Crossbar& xbar2, const NetworkPairs& pairs, const TuningSpec& spec)
{
    NetworkImport r;
    r.layer1 = import_conductance_map(xbar1, to_crossbar_grid(pairs.layer1, xbar1.rows(), xbar1.cols()), spec, true);
    r.layer2 = import_conductance_map(xbar2, to_crossbar_grid(pairs.layer2, xbar2.rows(), xbar2.cols()), spec, true);
    return r;
}

double hardware_fidelity(const Crossbar& xbar1, const Crossbar& xbar2, const Dataset& data,
                         const NetworkTopology& topo)
{
    return evaluate_fidelity([&](const Pixels& px) { return infer(xbar1, xbar2, px, topo).predicted; }, data)
        .fidelity;
}

PipelineResult run_ex_situ_pipeline(const HardwareConfig& hw, const TrainingConfig& tc, bool aware,
                                    std::uint64_t hw_seed, const Dataset& train, const Dataset& test,
                                    const NetworkPairs& oblivious_pairs)
{
    Hardware h = fabricate(hw, hw_seed);
    NetworkPairs pairs = oblivious_pairs;
    if (aware) {
        const DefectMap defects = defect_map(h.xbar1, h.xbar2, hw.import_tuning.v_read);
        pairs = train_ex_situ(train, tc, &defects).pairs;
    }
    const NetworkImport imp = import_network(h.xbar1, h.xbar2, pairs, hw.import_tuning);
    PipelineResult r;
    r.defective_fraction = h.defective_fraction();
    r.non_converged = imp.layer1.non_converged + imp.layer2.non_converged;
    r.train_fidelity = hardware_fidelity(h.xbar1, h.xbar2, train);
    r.test_fidelity = hardware_fidelity(h.xbar1, h.xbar2, test);
    return r;
}

}  // namespace xbarsim
