#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xbarsim/device.hpp"

namespace xbarsim {

enum class LineModel { ideal, wire_resistive };

enum class BiasKind { v_half, v_third };

struct BiasScheme {
    BiasKind kind = BiasKind::v_half;
    double v_write = 0.0;
};

// Rows are output lines held at virtual ground, columns are driven inputs.
class Crossbar {
public:
    Crossbar(std::size_t rows, std::size_t cols, std::vector<MemristorDevice> devices, double r_wire = 0.0,
             LineModel line_model = LineModel::ideal);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double r_wire() const { return r_wire_; }
    LineModel line_model() const { return line_model_; }
    void set_line_model(LineModel m, double r_wire);

    MemristorDevice& at(std::size_t r, std::size_t c);
    const MemristorDevice& at(std::size_t r, std::size_t c) const;

    // Effective (linear) conductances, as seen by the ideal readout.
    Eigen::MatrixXd conductances() const;
    // Measured conductances at v_read, through the device I-V.
    Eigen::MatrixXd read_back(double v_read = 0.2) const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<MemristorDevice> devices_;
    double r_wire_;
    LineModel line_model_;
};

Crossbar build_crossbar(std::size_t rows, std::size_t cols, const DeviceVariationSpec& spec, double r_wire,
                        std::uint64_t seed);

Eigen::MatrixXd device_voltage_map(const Crossbar& xbar, std::size_t sel_row, std::size_t sel_col,
                                   const BiasScheme& bias);

Eigen::VectorXd vmm_ideal(const Crossbar& xbar, const Eigen::VectorXd& column_voltages);
Eigen::VectorXd vmm_wire_resistive(const Crossbar& xbar, const Eigen::VectorXd& column_voltages);
// Dispatches on the crossbar's line model.
Eigen::VectorXd vmm(const Crossbar& xbar, const Eigen::VectorXd& column_voltages);

struct RowUpdateReport {
    std::size_t pulsed = 0;
    std::size_t disturbed = 0;  // half-selected devices whose state changed
};

// One parallel write step on a single row: every selected column gets the full
// amplitude, the remaining devices see the bias scheme's half-select levels.
RowUpdateReport apply_row_pulses(Crossbar& xbar, std::size_t row, const std::vector<bool>& selected_cols,
                                 double amplitude, double width, BiasKind bias);

// Conductance grid CSV: row-major, values in siemens, no header.
void write_grid_csv(std::ostream& os, const Eigen::MatrixXd& grid);
void write_grid_csv(const std::string& path, const Eigen::MatrixXd& grid);
Eigen::MatrixXd read_grid_csv(std::istream& is);
Eigen::MatrixXd read_grid_csv(const std::string& path);

// Full device-state snapshot (one device per line) so later stages consume files only.
void write_snapshot(const std::string& path, const Crossbar& xbar);
Crossbar read_snapshot(const std::string& path);

}  // namespace xbarsim
