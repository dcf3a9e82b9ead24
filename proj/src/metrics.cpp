#include "sigspec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sigspec/numerics.hpp"

namespace sigspec {

double hungarian(const std::vector<std::vector<double>>& cost,
                 std::vector<int>& assignment) {
    // Kuhn-Munkres with potentials, O(n^3), square matrix.
    const int n = int(cost.size());
    assignment.assign(n, -1);
    if (n == 0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            int i0 = p[j0], j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[j]) {
            assignment[p[j] - 1] = j - 1;
            total += cost[p[j] - 1][j - 1];
        }
    }
    return total;
}

double ospa(std::span<const double> psi, std::span<const double> upsilon) {
    const int m = int(psi.size()), k = int(upsilon.size());
    if (m == 0 && k == 0) return 0.0;
    if (m == 0 || k == 0) return 1.0;
    const int n = std::max(m, k);
    // Pad to square with unmatched cost 1; real pairs pay min(|x-y|, 1).
    std::vector<std::vector<double>> cost(n, std::vector<double>(n, 1.0));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j)
            cost[i][j] = std::min(std::fabs(psi[i] - upsilon[j]), 1.0);
    std::vector<int> assignment;
    return hungarian(cost, assignment) / double(n);
}

CountStats count_stats(std::span<const long> counts) {
    if (counts.size() < 2)
        throw InsufficientReplicationsError("count_stats: need at least two samples");
    CountStats st;
    st.n_reps = long(counts.size());
    double sum = 0.0;
    for (long c : counts) sum += double(c);
    st.mean = sum / double(st.n_reps);
    double ss = 0.0;
    std::map<long, long> freq;
    for (long c : counts) {
        double d = double(c) - st.mean;
        ss += d * d;
        ++freq[c];
    }
    st.variance = ss / double(st.n_reps - 1);
    for (auto [k, f] : freq) st.pmf[k] = double(f) / double(st.n_reps);
    return st;
}

std::vector<PPPoint> pp_points(const CountStats& stats, double poisson_mean) {
    if (!(poisson_mean > 0.0))
        throw ParameterError("pp_points: poisson_mean must be positive");
    std::vector<PPPoint> pts;
    double acc = 0.0;
    for (auto [k, f] : stats.pmf) {
        acc += f;
        pts.push_back({k, acc, poisson_cdf(k, poisson_mean)});
    }
    return pts;
}

double dtv_counts(const CountStats& stats, double poisson_mean) {
    if (!(poisson_mean > 0.0))
        throw ParameterError("dtv_counts: poisson_mean must be positive");
    const long k_max = stats.pmf.empty() ? -1 : stats.pmf.rbegin()->first;
    double sum = 0.0;
    for (long k = 0; k <= k_max; ++k) {
        auto it = stats.pmf.find(k);
        double p_hat = it == stats.pmf.end() ? 0.0 : it->second;
        sum += std::fabs(p_hat - poisson_pmf(k, poisson_mean));
    }
    sum += 1.0 - poisson_cdf(k_max, poisson_mean); // unobserved upper tail
    return 0.5 * sum;
}

double dispersion(const CountStats& stats) {
    if (!(stats.mean > 0.0))
        throw ParameterError("dispersion: mean must be positive");
    return stats.variance / stats.mean;
}

} // namespace sigspec
