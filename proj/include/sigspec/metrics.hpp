#pragma once

#include <map>
#include <span>
#include <vector>

#include "sigspec/common.hpp"

namespace sigspec {

/// Optimal-subpattern-assignment distance between finite configurations on a
/// line segment, order parameter and cutoff both 1: the optimal pairing cost
/// with per-point distance min(|x-y|, 1) and unmatched points charged 1,
/// divided by the larger cardinality.  Empty vs empty is 0.  Solved exactly
/// by the Hungarian algorithm (the truncated distance is concave, so greedy
/// sorted matching is not reliable).
double ospa(std::span<const double> psi, std::span<const double> upsilon);

/// Minimum-cost assignment on a square cost matrix; returns the total cost.
/// `assignment[row] = column`.
double hungarian(const std::vector<std::vector<double>>& cost,
                 std::vector<int>& assignment);

/// Summary of replicated integer counts.
struct CountStats {
    long n_reps = 0;
    double mean = 0.0;
    double variance = 0.0;          // unbiased
    std::map<long, double> pmf;     // empirical frequencies, sums to 1
};

CountStats count_stats(std::span<const long> counts);

/// One P-P point per observed integer k: the empirical CDF at k paired with
/// the Poisson CDF at k, ascending in k.
struct PPPoint {
    long k;
    double ecdf;
    double pcdf;
};

std::vector<PPPoint> pp_points(const CountStats& stats, double poisson_mean);

/// Total variation distance between the empirical count pmf and
/// Poisson(poisson_mean), with the analytic Poisson mass beyond the largest
/// observed count included.  A lower bound for any process-level total
/// variation distance, since restriction to a count is measurable.
double dtv_counts(const CountStats& stats, double poisson_mean);

/// variance / mean; near 1 for Poisson counts, above 1 when clustering
/// overdisperses the spectrum.
double dispersion(const CountStats& stats);

} // namespace sigspec
