#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigspec/bounds.hpp"
#include "sigspec/common.hpp"
#include "sigspec/correlation.hpp"
#include "sigspec/metrics.hpp"
#include "sigspec/placement.hpp"
#include "sigspec/spectrum.hpp"

namespace sigspec {

enum class SamplerKind { ExactCholesky, Spectral };

/// A full experiment description; see the config-file grammar in the README.
struct ExperimentConfig {
    PlacementKind placement = PlacementKind::Poisson;
    double kappa = 1.0;          // km^-2 (hard core: target retained intensity)
    double disc_radius = 10.0;   // km
    double hardcore_distance = 0.0;
    std::string points_file;

    double K = 1.0;
    double beta = 4.0;
    double sigma = 1.0;

    CorrelationModel correlation;

    std::vector<double> thresholds; // ascending, normalized units
    long n_reps = 1;
    std::uint64_t seed = 1;
    int workers = 0;                // 0 -> hardware concurrency
    SamplerKind sampler = SamplerKind::ExactCholesky;
    long spectral_features = 0;     // 0 -> sampler default
    double active_cut = 0.0;        // random placements: drop points whose
                                    // marginal probability at the largest
                                    // threshold is below this (bias <= n*cut)
    std::string out_prefix = "out";

    // [bounds] section
    BoundCase bound_case = BoundCase::Deterministic;
    double bound_t = 0.0;           // 0 -> largest threshold
    double bound_R = 1.0;
    double bound_C = 0.0;           // 0 -> disc radius
    double tail_exponent = 1.0;
    double bound_d = 0.0;           // 0 -> schedule value 1/sigma^2
    double bound_eps0 = 0.0;        // 0 -> schedule bisection value
    double bound_eps_c = 0.0;       // 0 -> schedule value
    double bound_t_star = 0.0;      // 0 -> 16 e kappa R^2
    MeanDevMode mean_dev_mode = MeanDevMode::MonteCarlo;
    double gamma_plus = 0.0;
    int mean_dev_reps = 200;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
void write_config(const ExperimentConfig& cfg, std::ostream& out);

PropagationParams propagation_of(const ExperimentConfig& cfg);

struct ReplicationRecord {
    std::vector<long> counts;  // one per threshold
    long n_points = 0;         // points the field was sampled at
    double ridge = 0.0;
};

struct ThresholdSummary {
    double threshold = 0.0;
    double analytic_mean = 0.0; // M(t) for the placement
    CountStats stats;
    double dispersion = 0.0;
    double dtv = 0.0;           // against Poisson(analytic_mean)
};

struct ExperimentResult {
    std::vector<double> thresholds;
    std::vector<ReplicationRecord> reps;
    std::vector<ThresholdSummary> summaries; // empty when n_reps < 2
    double realized_intensity_mean = 0.0;
    long ridge_events = 0;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
    int workers_used = 0;
};

/// Runs the Monte Carlo experiment.  Deterministic placements build the
/// configuration and its factorization once and share them across a worker
/// pool; random placements redraw the configuration every replication.
/// Replication r always uses the engine derived from (seed, r), so records
/// are byte-identical for a fixed config and seed at any worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_replications_csv(const ExperimentResult& result, std::ostream& out);
void write_summary(const ExperimentConfig& cfg, const ExperimentResult& result,
                   std::ostream& out);

/// Builds BoundInputs from a config (deterministic cases generate the
/// configuration and measure it; random cases fill the process descriptors,
/// defaulting unset fields from the convergence schedule) and evaluates the
/// requested bound.
BoundReport run_bounds(const ExperimentConfig& cfg, bool tv = false);

/// Per-sigma totals of the scheduled bound, for sweep diagnostics.
struct SweepRow {
    double sigma = 0.0;
    bool valid = false;
    double total = 0.0;
};
std::vector<SweepRow> run_bounds_sweep(const ExperimentConfig& cfg,
                                       const std::vector<double>& sigmas);

} // namespace sigspec
