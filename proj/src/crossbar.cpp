#include "xbarsim/crossbar.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Sparse>

#include "xbarsim/errors.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

Crossbar::Crossbar(std::size_t rows, std::size_t cols, std::vector<MemristorDevice> devices, double r_wire,
                   LineModel line_model)
    : rows_(rows), cols_(cols), devices_(std::move(devices)), r_wire_(r_wire), line_model_(line_model)
{
    if (rows == 0 || cols == 0)
        throw ConfigError("crossbar dimensions must be at least 1x1");
    if (devices_.size() != rows * cols)
        throw ConfigError("device count does not match crossbar dimensions");
    if (!(r_wire >= 0))
        throw ConfigError("wire segment resistance must be non-negative");
}

void Crossbar::set_line_model(LineModel m, double r_wire)
{
    if (!(r_wire >= 0))
        throw ConfigError("wire segment resistance must be non-negative");
    line_model_ = m;
    r_wire_ = r_wire;
}

MemristorDevice& Crossbar::at(std::size_t r, std::size_t c)
{
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("crossbar index out of range");
    return devices_[r * cols_ + c];
}

const MemristorDevice& Crossbar::at(std::size_t r, std::size_t c) const
{
    if (r >= rows_ || c >= cols_)
        throw std::out_of_range("crossbar index out of range");
    return devices_[r * cols_ + c];
}

Eigen::MatrixXd Crossbar::conductances() const
{
    Eigen::MatrixXd g(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            g(r, c) = devices_[r * cols_ + c].effective_conductance();
    return g;
}

Eigen::MatrixXd Crossbar::read_back(double v_read) const
{
    Eigen::MatrixXd g(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            g(r, c) = read_conductance(devices_[r * cols_ + c], v_read);
    return g;
}

Crossbar build_crossbar(std::size_t rows, std::size_t cols, const DeviceVariationSpec& spec, double r_wire,
                        std::uint64_t seed)
{
    if (rows == 0 || cols == 0)
        throw ConfigError("crossbar dimensions must be at least 1x1");
    spec.validate();
    std::vector<MemristorDevice> devices;
    devices.reserve(rows * cols);
    for (std::size_t i = 0; i < rows * cols; ++i)
        devices.push_back(sample_device(spec, derive_seed(seed, "cell", i)));
    return Crossbar(rows, cols, std::move(devices), r_wire);
}

namespace {

// Line potentials for a write; device voltage is column minus row.
struct LinePotentials {
    std::vector<double> row;
    std::vector<double> col;
};

LinePotentials write_potentials(std::size_t rows, std::size_t cols, std::size_t sel_row,
                                const std::vector<bool>& sel_cols, double v, BiasKind bias)
{
    LinePotentials p;
    const double idle_row = bias == BiasKind::v_half ? 0.0 : v / 6.0;
    const double idle_col = bias == BiasKind::v_half ? 0.0 : -v / 6.0;
    p.row.assign(rows, idle_row);
    p.col.assign(cols, idle_col);
    p.row[sel_row] = -v / 2.0;
    for (std::size_t c = 0; c < cols; ++c)
        if (sel_cols[c])
            p.col[c] = v / 2.0;
    return p;
}

}  // namespace

Eigen::MatrixXd device_voltage_map(const Crossbar& xbar, std::size_t sel_row, std::size_t sel_col,
                                   const BiasScheme& bias)
{
    if (sel_row >= xbar.rows() || sel_col >= xbar.cols())
        throw std::out_of_range("selected cell out of range");
    std::vector<bool> sel(xbar.cols(), false);
    sel[sel_col] = true;
    const auto p = write_potentials(xbar.rows(), xbar.cols(), sel_row, sel, bias.v_write, bias.kind);
    Eigen::MatrixXd v(xbar.rows(), xbar.cols());
    for (std::size_t r = 0; r < xbar.rows(); ++r)
        for (std::size_t c = 0; c < xbar.cols(); ++c)
            v(r, c) = p.col[c] - p.row[r];
    return v;
}

Eigen::VectorXd vmm_ideal(const Crossbar& xbar, const Eigen::VectorXd& column_voltages)
{
    if (static_cast<std::size_t>(column_voltages.size()) != xbar.cols())
        throw std::invalid_argument("input length does not match crossbar columns");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xbar.rows()));
    for (std::size_t r = 0; r < xbar.rows(); ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < xbar.cols(); ++c)
            acc += column_voltages[static_cast<Eigen::Index>(c)] * xbar.at(r, c).effective_conductance();
        out[static_cast<Eigen::Index>(r)] = acc;
    }
    return out;
}

Eigen::VectorXd vmm_wire_resistive(const Crossbar& xbar, const Eigen::VectorXd& column_voltages)
{
    if (static_cast<std::size_t>(column_voltages.size()) != xbar.cols())
        throw std::invalid_argument("input length does not match crossbar columns");
    if (xbar.r_wire() == 0.0)
        return vmm_ideal(xbar, column_voltages);

    const auto R = static_cast<Eigen::Index>(xbar.rows());
    const auto C = static_cast<Eigen::Index>(xbar.cols());
    const double gw = 1.0 / xbar.r_wire();
    // column node (i,k) at i*C+k; row node (i,k) at R*C + i*C+k
    auto cn = [C](Eigen::Index i, Eigen::Index k) { return i * C + k; };
    auto rn = [R, C](Eigen::Index i, Eigen::Index k) { return R * C + i * C + k; };
    const Eigen::Index n = 2 * R * C;

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * 5);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    auto link = [&t](Eigen::Index a, Eigen::Index b, double g) {
        t.emplace_back(a, a, g);
        t.emplace_back(b, b, g);
        t.emplace_back(a, b, -g);
        t.emplace_back(b, a, -g);
    };
    for (Eigen::Index k = 0; k < C; ++k) {
        t.emplace_back(cn(0, k), cn(0, k), gw);
        rhs[cn(0, k)] += gw * column_voltages[k];
        for (Eigen::Index i = 0; i + 1 < R; ++i)
            link(cn(i, k), cn(i + 1, k), gw);
    }
    for (Eigen::Index i = 0; i < R; ++i) {
        t.emplace_back(rn(i, 0), rn(i, 0), gw);
        for (Eigen::Index k = 0; k + 1 < C; ++k)
            link(rn(i, k), rn(i, k + 1), gw);
        for (Eigen::Index k = 0; k < C; ++k)
            link(cn(i, k), rn(i, k),
                 xbar.at(static_cast<std::size_t>(i), static_cast<std::size_t>(k)).effective_conductance());
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("nodal system is singular");
    const Eigen::VectorXd v = solver.solve(rhs);
    Eigen::VectorXd out(R);
    for (Eigen::Index i = 0; i < R; ++i)
        out[i] = gw * v[rn(i, 0)];
    return out;
}

Eigen::VectorXd vmm(const Crossbar& xbar, const Eigen::VectorXd& column_voltages)
{
    return xbar.line_model() == LineModel::ideal ? vmm_ideal(xbar, column_voltages)
                                                 : vmm_wire_resistive(xbar, column_voltages);
}

RowUpdateReport apply_row_pulses(Crossbar& xbar, std::size_t row, const std::vector<bool>& selected_cols,
                                 double amplitude, double width, BiasKind bias)
{
    if (row >= xbar.rows() || selected_cols.size() != xbar.cols())
        throw std::out_of_range("row update outside crossbar");
    RowUpdateReport rep;
    bool any = false;
    for (bool b : selected_cols)
        any = any || b;
    if (!any || amplitude == 0.0)
        return rep;
    const auto p = write_potentials(xbar.rows(), xbar.cols(), row, selected_cols, amplitude, bias);
    for (std::size_t r = 0; r < xbar.rows(); ++r) {
        for (std::size_t c = 0; c < xbar.cols(); ++c) {
            const double v = p.col[c] - p.row[r];
            if (v == 0.0)
                continue;
            const bool selected = r == row && selected_cols[c];
            const double dg = apply_pulse(xbar.at(r, c), v, width);
            if (selected)
                ++rep.pulsed;
            else if (dg != 0.0)
                ++rep.disturbed;
        }
    }
    return rep;
}

void write_grid_csv(std::ostream& os, const Eigen::MatrixXd& grid)
{
    char buf[32];
    for (Eigen::Index r = 0; r < grid.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", grid(r, c));
            if (c)
                os << ',';
            os << buf;
        }
        os << '\n';
    }
}

void write_grid_csv(const std::string& path, const Eigen::MatrixXd& grid)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    write_grid_csv(os, grid);
}

Eigen::MatrixXd read_grid_csv(std::istream& is)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double x = 0;
            try {
                x = std::stod(cell, &used);
            } catch (const std::exception&) {
                throw ConfigError("bad number in grid CSV: '" + cell + "'");
            }
            if (used != cell.size())
                throw ConfigError("bad number in grid CSV: '" + cell + "'");
            vals.push_back(x);
        }
        if (!rows.empty() && vals.size() != rows.front().size())
            throw ConfigError("ragged grid CSV");
        rows.push_back(std::move(vals));
    }
    if (rows.empty())
        throw ConfigError("empty grid CSV");
    Eigen::MatrixXd g(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            g(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return g;
}

Eigen::MatrixXd read_grid_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read " + path);
    return read_grid_csv(is);
}

void write_snapshot(const std::string& path, const Crossbar& xbar)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path);
    char buf[512];
    std::snprintf(buf, sizeof buf, "xbarsim-snapshot 1 %zu %zu %.17g %d\n", xbar.rows(), xbar.cols(),
                  xbar.r_wire(), xbar.line_model() == LineModel::ideal ? 0 : 1);
    os << buf;
    for (std::size_t r = 0; r < xbar.rows(); ++r) {
        for (std::size_t c = 0; c < xbar.cols(); ++c) {
            const auto& d = xbar.at(r, c);
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %d %d %.17g %.17g\n",
                          d.conductance, d.set_threshold, d.reset_threshold, d.g_min, d.g_max,
                          d.nonlinearity_alpha, d.kinetics_rate, d.kinetics_voltage_scale, d.stuck ? 1 : 0,
                          d.formed ? 1 : 0, d.pristine_conductance, d.forming_current);
            os << buf;
        }
    }
}

Crossbar read_snapshot(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("missing crossbar snapshot: " + path);
    std::string magic;
    int version = 0, model = 0;
    std::size_t rows = 0, cols = 0;
    double r_wire = 0;
    is >> magic >> version >> rows >> cols >> r_wire >> model;
    if (!is || magic != "xbarsim-snapshot" || version != 1)
        throw ConfigError("not a crossbar snapshot: " + path);
    std::vector<MemristorDevice> devices(rows * cols);
    for (auto& d : devices) {
        int stuck = 0, formed = 0;
        is >> d.conductance >> d.set_threshold >> d.reset_threshold >> d.g_min >> d.g_max >> d.nonlinearity_alpha >>
            d.kinetics_rate >> d.kinetics_voltage_scale >> stuck >> formed >> d.pristine_conductance >>
            d.forming_current;
        d.stuck = stuck != 0;
        d.formed = formed != 0;
    }
    if (!is)
        throw ConfigError("truncated crossbar snapshot: " + path);
    return Crossbar(rows, cols, std::move(devices), r_wire, model == 0 ? LineModel::ideal : LineModel::wire_resistive);
}

}  // namespace xbarsim
