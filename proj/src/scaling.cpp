#include "xbarsim/scaling.hpp"

#include <cmath>
#include <vector>

#include "xbarsim/errors.hpp"

namespace xbarsim {

double ladder_worst_case_drop(long n_segments, double r_w, double g)
{
    if (n_segments < 1 || r_w < 0 || g < 0)
        throw DomainError("ladder needs n >= 1, R_w >= 0, G >= 0");
    if (r_w == 0.0 || g == 0.0)
        return 0.0;
    // node k (1..n): v[k-1] - (2+RG) v[k] + v[k+1] = 0, far end has no right neighbour; v[0] = 1.
    // Thomas algorithm on the tridiagonal system.
    const auto n = static_cast<std::size_t>(n_segments);
    const double rg = r_w * g;
    std::vector<double> cp(n), dp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double b = (k + 1 == n) ? -(1.0 + rg) : -(2.0 + rg);
        const double a = k == 0 ? 0.0 : 1.0;
        const double c = (k + 1 == n) ? 0.0 : 1.0;
        const double d = k == 0 ? -1.0 : 0.0;
        const double m = b - (k == 0 ? 0.0 : a * cp[k - 1]);
        cp[k] = c / m;
        dp[k] = (d - (k == 0 ? 0.0 : a * dp[k - 1])) / m;
    }
    return 1.0 - dp[n - 1];  // back substitution is not needed for the last node
}

double write_budget(double v_th_min, double v_th_max, BiasKind bias)
{
    v_th_min = std::abs(v_th_min);
    v_th_max = std::abs(v_th_max);
    if (bias == BiasKind::v_third)
        return (3.0 * v_th_min - v_th_max) / v_th_max / 2.0;
    return (2.0 * v_th_min - v_th_max) / v_th_max;
}

DimensionResult max_crossbar_dimension(double v_th_min, double v_th_max, double g_select, double r_w,
                                       BiasKind bias)
{
    DimensionResult res;
    res.budget = write_budget(v_th_min, v_th_max, bias);
    if (!(res.budget > 0)) {
        res.diagnostic = "no safe write window: largest threshold exceeds the half-select margin";
        res.budget = 0.0;
        return res;
    }
    constexpr long cap = 1L << 22;
    auto ok = [&](long n) { return ladder_worst_case_drop(n, r_w, g_select) <= res.budget; };
    if (!ok(1)) {
        res.diagnostic = "a single segment already exceeds the budget";
        return res;
    }
    long lo = 1, hi = 2;
    while (hi <= cap && ok(hi)) {
        lo = hi;
        hi *= 2;
    }
    if (hi > cap) {
        res.n_max = cap;
        res.diagnostic = "budget never exceeded below the search cap";
        return res;
    }
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        (ok(mid) ? lo : hi) = mid;
    }
    res.n_max = lo;
    return res;
}

double calibrate_wire_resistance(long n, double budget, double g)
{
    // drop is increasing in R_w: bisect for drop(n) == budget and drop(n+1) == budget, take the geometric mean
    auto solve = [&](long m) {
        double lo = 0.0, hi = 1.0;
        while (ladder_worst_case_drop(m, hi, g) < budget)
            hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ladder_worst_case_drop(m, mid, g) < budget ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    return std::sqrt(solve(n) * solve(n + 1));
}

}  // namespace xbarsim
