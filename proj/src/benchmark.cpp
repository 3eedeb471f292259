#include "xbarsim/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "xbarsim/errors.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

namespace {

// Same content as data/canonical_training.txt; 4x4 row-major, '1' is a black pixel.
constexpr const char* canonical_text = R"(
0110100111111001 A
0110100111111101 A
0110100111011001 A
0100101011101010 A
0010010101110101 A
0110100111111000 A
1110101011101010 A
0111010101110101 A
0110111110011001 A
0110100111110001 A
1111011001100110 T
1111010001000100 T
1111001000100010 T
1110010001000100 T
0111001000100010 T
1111011001100000 T
1111100101100110 T
1111011001000100 T
1111011000100010 T
1110010001000000 T
1001100110010110 V
1001100101100110 V
1001100101100000 V
1010101001000000 V
0101010100100000 V
1001011001100000 V
1001100101010010 V
1001100101101000 V
1001100101000100 V
1001011001100001 V
1001011001101001 X
1001011010010000 X
1010010010100000 X
0101001001010000 X
1001010001101001 X
1001011001101000 X
1001011001001001 X
1001100101100001 X
1001100101101001 X
1001011010011001 X
)";

}  // namespace

std::size_t class_index(char letter)
{
    for (std::size_t k = 0; k < n_classes; ++k)
        if (class_letters[k] == letter)
            return k;
    throw ConfigError(std::string("unknown class letter '") + letter + "'");
}

Dataset read_patterns(std::istream& is)
{
    Dataset set;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.size() != NetworkTopology::n_pixels + 2 || line[NetworkTopology::n_pixels] != ' ')
            throw ConfigError("pattern line " + std::to_string(lineno) + ": expected 16 pixels, space, class");
        Pattern p;
        for (std::size_t i = 0; i < NetworkTopology::n_pixels; ++i) {
            if (line[i] != '0' && line[i] != '1')
                throw ConfigError("pattern line " + std::to_string(lineno) + ": pixels must be 0 or 1");
            p.pixels[i] = line[i] - '0';
        }
        p.label = class_index(line.back());
        set.push_back(p);
    }
    return set;
}

Dataset read_patterns(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read pattern file " + path);
    return read_patterns(is);
}

void write_patterns(std::ostream& os, const Dataset& set)
{
    for (const auto& p : set) {
        for (int px : p.pixels)
            os << (px ? '1' : '0');
        os << ' ' << class_letters[p.label] << '\n';
    }
}

Dataset canonical_training_set()
{
    std::istringstream is(canonical_text);
    return read_patterns(is);
}

Dataset generate_test_set(const Dataset& training)
{
    Dataset out;
    out.reserve(training.size() * NetworkTopology::n_pixels);
    for (std::size_t t = 0; t < training.size(); ++t) {
        for (std::size_t i = 0; i < NetworkTopology::n_pixels; ++i) {
            Pattern p = training[t];
            p.pixels[i] ^= 1;
            p.parent = static_cast<int>(t);
            p.flipped = static_cast<int>(i);
            out.push_back(p);
        }
    }
    return out;
}

Dataset select_classes(const Dataset& set, const std::string& letters)
{
    std::vector<bool> keep(n_classes, false);
    for (char c : letters)
        keep[class_index(c)] = true;
    Dataset out;
    for (const auto& p : set)
        if (keep[p.label])
            out.push_back(p);
    return out;
}

FidelityReport evaluate_fidelity(const Classifier& model, const Dataset& patterns)
{
    FidelityReport r;
    long ok = 0;
    for (const auto& p : patterns) {
        const std::size_t k = model(p.pixels);
        if (k >= n_classes)
            throw std::out_of_range("classifier returned an invalid class");
        r.confusion(static_cast<Eigen::Index>(p.label), static_cast<Eigen::Index>(k))++;
        ok += k == p.label;
    }
    r.fidelity = patterns.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(patterns.size());
    return r;
}

Inference infer_weights(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2, const Pixels& pixels,
                        const NetworkTopology& topo)
{
    const Eigen::VectorXd x = encode_inputs(pixels, topo);
    Inference r;
    r.hidden.resize(w1.cols());
    for (Eigen::Index j = 0; j < w1.cols(); ++j)
        r.hidden[j] = neuron_hidden(x.dot(w1.col(j)), topo);
    Eigen::VectorXd h(w1.cols() + 1);
    h.head(w1.cols()) = r.hidden;
    h[w1.cols()] = topo.bias_level;
    r.outputs.resize(w2.cols());
    for (Eigen::Index k = 0; k < w2.cols(); ++k)
        r.outputs[k] = neuron_output(h.dot(w2.col(k)), topo);
    r.predicted = argmax_lowest(r.outputs);
    return r;
}

SweepRow summarize(double sigma, std::vector<double> v)
{
    if (v.empty())
        throw std::invalid_argument("no values to summarize");
    std::sort(v.begin(), v.end());
    auto q = [&v](double f) {
        const double pos = f * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    return {sigma, q(0.5), q(0.25), q(0.75), v.front(), v.back()};
}

double sigma_for_tolerance(double tolerance)
{
    return tolerance / std::sqrt(3.0);
}

SweepStats precision_sweep(const Eigen::MatrixXd& w1, const Eigen::MatrixXd& w2, const std::vector<double>& sigmas,
                           int runs, std::uint64_t seed, const Dataset& train, const Dataset& test,
                           double w_limit, const NetworkTopology& topo)
{
    if (runs < 1)
        throw ConfigError("precision sweep needs at least one run");
    // one noise draw per run, shared by every sigma (common random numbers)
    std::vector<Eigen::MatrixXd> z1, z2;
    for (int r = 0; r < runs; ++r) {
        Rng rng(derive_seed(seed, "noise", static_cast<std::uint64_t>(r)));
        Eigen::MatrixXd a(w1.rows(), w1.cols()), b(w2.rows(), w2.cols());
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a(i) = rng.normal(0.0, 1.0);
        for (Eigen::Index i = 0; i < b.size(); ++i)
            b(i) = rng.normal(0.0, 1.0);
        z1.push_back(std::move(a));
        z2.push_back(std::move(b));
    }
    auto fid = [&topo](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Dataset& d) {
        return evaluate_fidelity([&](const Pixels& px) { return infer_weights(a, b, px, topo).predicted; }, d)
            .fidelity;
    };
    SweepStats st;
    for (double s : sigmas) {
        std::vector<double> tr, te;
        for (int r = 0; r < runs; ++r) {
            const Eigen::MatrixXd a =
                (w1.array() * (1.0 + s * z1[static_cast<std::size_t>(r)].array())).cwiseMax(-w_limit).cwiseMin(w_limit);
            const Eigen::MatrixXd b =
                (w2.array() * (1.0 + s * z2[static_cast<std::size_t>(r)].array())).cwiseMax(-w_limit).cwiseMin(w_limit);
            tr.push_back(fid(a, b, train));
            te.push_back(fid(a, b, test));
        }
        st.train.push_back(summarize(s, tr));
        st.test.push_back(summarize(s, te));
    }
    return st;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    os << "sigma,median,p25,p75,min,max\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.sigma, r.median, r.p25, r.p75, r.min,
                      r.max);
        os << buf;
    }
}

namespace {

// Phase-one simplex with Bland's rule: is {x >= 0 : A x = b} non-empty (b >= 0)?
bool feasible(const std::vector<std::vector<double>>& A, const std::vector<double>& b)
{
    const std::size_t m = A.size();
    const std::size_t n = m ? A.front().size() : 0;
    const std::size_t cols = n + m + 1;  // structural, artificial, rhs
    std::vector<std::vector<double>> t(m + 1, std::vector<double>(cols, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::copy(A[i].begin(), A[i].end(), t[i].begin());
        t[i][n + i] = 1.0;
        t[i][cols - 1] = b[i];
        basis[i] = n + i;
    }
    // objective row: minimise the sum of artificials, expressed in non-basic terms
    auto& z = t[m];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (j < n || j == cols - 1)
                z[j] -= t[i][j];
    constexpr double eps = 1e-9;
    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < n + m; ++j) {
            if (z[j] < -eps) {
                enter = j;
                break;
            }
        }
        if (enter == cols)
            break;
        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] > eps) {
                const double ratio = t[i][cols - 1] / t[i][enter];
                if (leave == m || ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
        }
        if (leave == m)
            break;  // unbounded direction cannot occur in phase one
        const double piv = t[leave][enter];
        for (auto& v : t[leave])
            v /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || t[i][enter] == 0.0)
                continue;
            const double f = t[i][enter];
            for (std::size_t j = 0; j < cols; ++j)
                t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
    return -z[cols - 1] <= 1e-7;
}

}  // namespace

bool linear_separability_check(const Dataset& patterns)
{
    if (patterns.empty())
        throw std::invalid_argument("separability check needs patterns");
    std::size_t k = 0;
    for (const auto& p : patterns)
        k = std::max(k, p.label + 1);
    constexpr std::size_t D = NetworkTopology::n_inputs;
    const std::size_t nw = k * D;
    // (w_y - w_c) . x >= 1 with w = u - v, minus a surplus: [x, -x, -e] . [u, v, s] = 1
    std::vector<std::vector<double>> rows;
    for (const auto& p : patterns) {
        std::array<double, D> x{};
        for (std::size_t i = 0; i < NetworkTopology::n_pixels; ++i)
            x[i] = p.pixels[i] ? 1.0 : -1.0;
        x[D - 1] = 1.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (c == p.label)
                continue;
            std::vector<double> r(nw, 0.0);
            for (std::size_t i = 0; i < D; ++i) {
                r[p.label * D + i] += x[i];
                r[c * D + i] -= x[i];
            }
            rows.push_back(std::move(r));
        }
    }
    if (rows.empty())
        return true;
    const std::size_t m = rows.size();
    std::vector<std::vector<double>> A(m, std::vector<double>(2 * nw + m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < nw; ++j) {
            A[i][j] = rows[i][j];
            A[i][nw + j] = -rows[i][j];
        }
        A[i][2 * nw + i] = -1.0;
    }
    return feasible(A, std::vector<double>(m, 1.0));
}

}  // namespace xbarsim
