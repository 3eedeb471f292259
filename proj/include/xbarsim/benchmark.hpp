#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xbarsim/mlp.hpp"

namespace xbarsim {

inline constexpr std::size_t n_classes = 4;
inline constexpr char class_letters[n_classes + 1] = "ATVX";

struct Pattern {
    Pixels pixels{};
    std::size_t label = 0;
    // provenance for test patterns: parent index in the training set and flipped pixel
    int parent = -1;
    int flipped = -1;
};

using Dataset = std::vector<Pattern>;

std::size_t class_index(char letter);

// Pattern file: one pattern per line, 16 characters of {0,1}, a space, the class letter.
Dataset read_patterns(std::istream& is);
Dataset read_patterns(const std::string& path);
void write_patterns(std::ostream& os, const Dataset& set);

Dataset canonical_training_set();
Dataset generate_test_set(const Dataset& training);
// Subset containing only the listed classes, labels unchanged.
Dataset select_classes(const Dataset& set, const std::string& letters);

struct FidelityReport {
    double fidelity = 0.0;
    Eigen::Matrix<long, n_classes, n_classes> confusion = Eigen::Matrix<long, n_classes, n_classes>::Zero();
};

using Classifier = std::function<std::size_t(const Pixels&)>;

FidelityReport evaluate_fidelity(const Classifier& model, const Dataset& patterns);

struct SweepRow {
    double sigma = 0.0;
    double median = 0.0, p25 = 0.0, p75 = 0.0, min = 0.0, max = 0.0;
};

struct SweepStats {
    std::vector<SweepRow> train;
    std::vector<SweepRow> test;
};

SweepRow summarize(double sigma, std::vector<double> values);

// Import-error analogue: each weight W becomes W*(1 + N(0, sigma)), then is clipped to
// the representable range. W matrices are (inputs x neurons) in siemens.
SweepStats precision_sweep(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2, const std::vector<double>& sigmas,
                           int runs, std::uint64_t seed, const Dataset& train, const Dataset& test,
                           double w_limit, const NetworkTopology& topo = {});

// Standard deviation of a uniform relative error bounded by the tolerance.
double sigma_for_tolerance(double tolerance);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

bool linear_separability_check(const Dataset& patterns);

// Pure-arithmetic MLP on weights in siemens (inputs x neurons), mirrors the pair-map inference.
Inference infer_weights(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2, const Pixels& pixels,
                        const NetworkTopology& topo = {});

}  // namespace xbarsim
