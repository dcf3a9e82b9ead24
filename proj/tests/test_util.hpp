#pragma once

// Shared helpers for the test and acceptance suites.

#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "sigspec/numerics.hpp"

namespace sigspec::testutil {

/// Pearson chi-square goodness-of-fit p-value of integer counts against
/// Poisson(mu).  Bins with expected count below 5 are pooled with their
/// neighbors; the mean is treated as known (df = bins - 1).
inline double chi2_gof_pvalue(std::span<const long> counts, double mu) {
    const double n = double(counts.size());
    std::map<long, long> observed;
    long kmax = 0;
    for (long c : counts) {
        ++observed[c];
        kmax = std::max(kmax, c);
    }
    std::vector<double> obs, expd;
    double o_acc = 0.0, e_acc = 0.0;
    for (long k = 0; k <= kmax; ++k) {
        auto it = observed.find(k);
        o_acc += it == observed.end() ? 0.0 : double(it->second);
        e_acc += poisson_pmf(k, mu) * n;
        if (e_acc >= 5.0) {
            obs.push_back(o_acc);
            expd.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    // upper tail beyond kmax joins the last open bin
    e_acc += (1.0 - poisson_cdf(kmax, mu)) * n;
    if (obs.empty() || e_acc >= 5.0) {
        obs.push_back(o_acc);
        expd.push_back(e_acc);
    } else {
        obs.back() += o_acc;
        expd.back() += e_acc;
    }
    if (obs.size() < 2) return 1.0;
    double stat = 0.0;
    for (size_t i = 0; i < obs.size(); ++i)
        stat += (obs[i] - expd[i]) * (obs[i] - expd[i]) / expd[i];
    return chi2_sf(stat, double(obs.size() - 1));
}

inline double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / double(v.size());
}

inline double sd_of(std::span<const double> v) {
    double m = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / double(v.size() - 1));
}

} // namespace sigspec::testutil
