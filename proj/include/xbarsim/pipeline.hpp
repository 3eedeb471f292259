#pragma once

#include <cstdint>

#include "xbarsim/benchmark.hpp"
#include "xbarsim/crossbar.hpp"
#include "xbarsim/forming.hpp"
#include "xbarsim/training.hpp"
#include "xbarsim/tuning.hpp"

namespace xbarsim {

struct HardwareConfig {
    std::size_t rows = 20;
    std::size_t cols = 20;
    DeviceVariationSpec devices = [] {
        DeviceVariationSpec d;
        d.pristine = true;
        return d;
    }();
    double r_wire = 0.0;
    LineModel line_model = LineModel::ideal;
    FormingSpec forming;
    TuningSpec import_tuning;  // 30% by default
};

struct Hardware {
    Crossbar xbar1;
    Crossbar xbar2;
    FormingReport report1;
    FormingReport report2;

    double defective_fraction() const;
};

// Two fresh crossbars, every cell formed.
Hardware fabricate(const HardwareConfig& cfg, std::uint64_t seed);

// Stuck conductances at the cells the network uses.
DefectMap defect_map(const Crossbar& xbar1, const Crossbar& xbar2, double v_read = 0.2);

struct NetworkImport {
    ImportResult layer1;
    ImportResult layer2;
};

NetworkImport import_network(Crossbar& xbar1, Crossbar& xbar2, const NetworkPairs& pairs, const TuningSpec& spec);

double hardware_fidelity(const Crossbar& xbar1, const Crossbar& xbar2, const Dataset& data,
                         const NetworkTopology& topo = {});

struct PipelineResult {
    double train_fidelity = 0.0;
    double test_fidelity = 0.0;
    double defective_fraction = 0.0;
    std::size_t non_converged = 0;
};

// form -> (aware: train with the defect map) -> import -> inference on the crossbars
PipelineResult run_ex_situ_pipeline(const HardwareConfig& hw, const TrainingConfig& tc, bool aware,
                                    std::uint64_t hw_seed, const Dataset& train, const Dataset& test,
                                    const NetworkPairs& oblivious_pairs);

}  // namespace xbarsim
