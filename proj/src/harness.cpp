#include "sigspec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "sigspec/gfield.hpp"
#include "sigspec/numerics.hpp"

namespace sigspec {

namespace {
constexpr double kPi = 3.141592653589793;
constexpr long kDenseLimit = 8000; // per-replication factorization cap

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

long to_long(const std::string& v, const std::string& key) {
    double d = to_double(v, key);
    if (d != std::floor(d))
        throw ConfigError("config: '" + key + "' must be an integer");
    return long(d);
}

std::vector<double> to_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        std::istringstream parts(item);
        std::string tok;
        while (parts >> tok) out.push_back(to_double(tok, key));
    }
    return out;
}

} // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    cfg.correlation = {CorrKind::Nugget, 1.0, 0.5, 2};
    std::string line, section;
    bool sigma_set = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        std::string qual = section + "." + key;
        if (qual == "placement.kind") cfg.placement = placement_kind_from_name(value);
        else if (qual == "placement.kappa") cfg.kappa = to_double(value, qual);
        else if (qual == "placement.radius") cfg.disc_radius = to_double(value, qual);
        else if (qual == "placement.hardcore_distance") cfg.hardcore_distance = to_double(value, qual);
        else if (qual == "placement.points_file") cfg.points_file = value;
        else if (qual == "propagation.K") cfg.K = to_double(value, qual);
        else if (qual == "propagation.beta") cfg.beta = to_double(value, qual);
        else if (qual == "shadowing.sigma") { cfg.sigma = to_double(value, qual); sigma_set = true; }
        else if (qual == "shadowing.sigma_db") {
            if (sigma_set) throw ConfigError("config: give sigma or sigma_db, not both");
            cfg.sigma = to_double(value, qual) * std::log(10.0) / 10.0;
            sigma_set = true;
        }
        else if (qual == "correlation.kind") cfg.correlation.kind = corr_kind_from_name(value);
        else if (qual == "correlation.scale") cfg.correlation.scale = to_double(value, qual);
        else if (qual == "correlation.smoothness") cfg.correlation.smoothness = to_double(value, qual);
        else if (qual == "run.thresholds") cfg.thresholds = to_list(value, qual);
        else if (qual == "run.n_reps") cfg.n_reps = to_long(value, qual);
        else if (qual == "run.seed") cfg.seed = std::uint64_t(to_long(value, qual));
        else if (qual == "run.workers") cfg.workers = int(to_long(value, qual));
        else if (qual == "run.sampler") {
            if (value == "cholesky") cfg.sampler = SamplerKind::ExactCholesky;
            else if (value == "spectral") cfg.sampler = SamplerKind::Spectral;
            else throw ConfigError("config: unknown sampler '" + value + "'");
        }
        else if (qual == "run.spectral_features") cfg.spectral_features = to_long(value, qual);
        else if (qual == "run.active_cut") cfg.active_cut = to_double(value, qual);
        else if (qual == "run.out") cfg.out_prefix = value;
        else if (qual == "bounds.case") {
            if (value == "det") cfg.bound_case = BoundCase::Deterministic;
            else if (value == "poisson") cfg.bound_case = BoundCase::PoissonPlacement;
            else if (value == "hardcore") cfg.bound_case = BoundCase::HardCore;
            else throw ConfigError("config: unknown bounds case '" + value + "'");
        }
        else if (qual == "bounds.t") cfg.bound_t = to_double(value, qual);
        else if (qual == "bounds.R") cfg.bound_R = to_double(value, qual);
        else if (qual == "bounds.C") cfg.bound_C = to_double(value, qual);
        else if (qual == "bounds.tail_exponent") cfg.tail_exponent = to_double(value, qual);
        else if (qual == "bounds.d") cfg.bound_d = to_double(value, qual);
        else if (qual == "bounds.eps0") cfg.bound_eps0 = to_double(value, qual);
        else if (qual == "bounds.eps_c") cfg.bound_eps_c = to_double(value, qual);
        else if (qual == "bounds.t_star") cfg.bound_t_star = to_double(value, qual);
        else if (qual == "bounds.mean_dev") {
            if (value == "montecarlo") cfg.mean_dev_mode = MeanDevMode::MonteCarlo;
            else if (value == "user") cfg.mean_dev_mode = MeanDevMode::UserGamma;
            else if (value == "quadrature") cfg.mean_dev_mode = MeanDevMode::Quadrature;
            else throw ConfigError("config: unknown mean_dev mode '" + value + "'");
        }
        else if (qual == "bounds.gamma_plus") cfg.gamma_plus = to_double(value, qual);
        else if (qual == "bounds.mean_dev_reps") cfg.mean_dev_reps = int(to_long(value, qual));
        else throw ConfigError("config: unknown key '" + qual + "'");
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    return parse_config(in);
}

void write_config(const ExperimentConfig& cfg, std::ostream& out) {
    char buf[64];
    auto num = [&](double v) {
        snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "[placement]\n";
    out << "kind = " << placement_kind_name(cfg.placement) << "\n";
    out << "kappa = " << num(cfg.kappa) << "\n";
    out << "radius = " << num(cfg.disc_radius) << "\n";
    if (cfg.hardcore_distance > 0.0)
        out << "hardcore_distance = " << num(cfg.hardcore_distance) << "\n";
    if (!cfg.points_file.empty()) out << "points_file = " << cfg.points_file << "\n";
    out << "\n[propagation]\nK = " << num(cfg.K) << "\nbeta = " << num(cfg.beta) << "\n";
    out << "\n[shadowing]\nsigma = " << num(cfg.sigma) << "\n";
    out << "\n[correlation]\nkind = " << corr_kind_name(cfg.correlation.kind) << "\n";
    out << "scale = " << num(cfg.correlation.scale) << "\n";
    out << "smoothness = " << num(cfg.correlation.smoothness) << "\n";
    out << "\n[run]\nthresholds =";
    for (size_t i = 0; i < cfg.thresholds.size(); ++i)
        out << (i ? ", " : " ") << num(cfg.thresholds[i]);
    out << "\nn_reps = " << cfg.n_reps << "\nseed = " << cfg.seed
        << "\nworkers = " << cfg.workers << "\nsampler = "
        << (cfg.sampler == SamplerKind::ExactCholesky ? "cholesky" : "spectral")
        << "\n";
    if (cfg.spectral_features > 0)
        out << "spectral_features = " << cfg.spectral_features << "\n";
    if (cfg.active_cut > 0.0) out << "active_cut = " << num(cfg.active_cut) << "\n";
    out << "out = " << cfg.out_prefix << "\n";
    out << "\n[bounds]\ncase = "
        << (cfg.bound_case == BoundCase::Deterministic      ? "det"
            : cfg.bound_case == BoundCase::PoissonPlacement ? "poisson"
                                                            : "hardcore")
        << "\n";
    out << "t = " << num(cfg.bound_t) << "\nR = " << num(cfg.bound_R)
        << "\nC = " << num(cfg.bound_C)
        << "\ntail_exponent = " << num(cfg.tail_exponent)
        << "\nd = " << num(cfg.bound_d) << "\neps0 = " << num(cfg.bound_eps0)
        << "\neps_c = " << num(cfg.bound_eps_c)
        << "\nt_star = " << num(cfg.bound_t_star) << "\nmean_dev = "
        << (cfg.mean_dev_mode == MeanDevMode::MonteCarlo   ? "montecarlo"
            : cfg.mean_dev_mode == MeanDevMode::UserGamma  ? "user"
                                                           : "quadrature")
        << "\ngamma_plus = " << num(cfg.gamma_plus)
        << "\nmean_dev_reps = " << cfg.mean_dev_reps << "\n";
}

PropagationParams propagation_of(const ExperimentConfig& cfg) {
    return {cfg.K, cfg.beta, cfg.sigma, cfg.kappa};
}

namespace {

void validate_experiment(const ExperimentConfig& cfg) {
    validate(propagation_of(cfg));
    validate(cfg.correlation);
    if (cfg.n_reps < 1) throw ConfigError("config: n_reps must be at least 1");
    if (cfg.thresholds.empty())
        throw ConfigError("config: at least one threshold is required");
    for (size_t i = 0; i < cfg.thresholds.size(); ++i) {
        if (!(cfg.thresholds[i] > 0.0))
            throw ConfigError("config: thresholds must be positive");
        if (i && !(cfg.thresholds[i] > cfg.thresholds[i - 1]))
            throw ConfigError("config: thresholds must be ascending");
    }
    if (!(cfg.disc_radius > 0.0) && cfg.placement != PlacementKind::Explicit)
        throw ConfigError("config: placement radius must be positive");
    if (cfg.placement == PlacementKind::HardCoreMatern2 &&
        !(cfg.hardcore_distance > 0.0))
        throw ConfigError("config: hardcore placement needs hardcore_distance");
    if (cfg.placement == PlacementKind::Explicit && cfg.points_file.empty())
        throw ConfigError("config: explicit placement needs points_file");
    if (cfg.active_cut < 0.0 || cfg.active_cut >= 1.0)
        throw ConfigError("config: active_cut must lie in [0, 1)");
    if (cfg.workers < 0) throw ConfigError("config: workers must be >= 0");
}

PointConfig build_deterministic(const ExperimentConfig& cfg) {
    if (cfg.placement == PlacementKind::HexGrid)
        return gen_hex_grid(cfg.kappa, cfg.disc_radius);
    return load_points_file(cfg.points_file);
}

PointConfig draw_random(const ExperimentConfig& cfg, Rng& rng) {
    if (cfg.placement == PlacementKind::Poisson)
        return gen_poisson(cfg.kappa, cfg.disc_radius, rng);
    double parent =
        matern2_parent_for_target(cfg.kappa, cfg.hardcore_distance);
    return gen_hardcore_matern2(parent, cfg.hardcore_distance,
                                cfg.disc_radius, rng);
}

template <typename Fn>
void parallel_reps(long n_reps, int workers, Fn&& body) {
    if (workers <= 1) {
        for (long r = 0; r < n_reps; ++r) body(r);
        return;
    }
    std::atomic<long> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto loop = [&] {
        for (;;) {
            long r = next.fetch_add(1);
            if (r >= n_reps) return;
            try {
                body(r);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(n_reps);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_experiment(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    const PropagationParams params = propagation_of(cfg);
    const bool deterministic = cfg.placement == PlacementKind::HexGrid ||
                               cfg.placement == PlacementKind::Explicit;
    const double t_max = cfg.thresholds.back();

    ExperimentResult result;
    result.thresholds = cfg.thresholds;
    result.seed = cfg.seed;
    result.workers_used = cfg.workers > 0
                              ? cfg.workers
                              : int(std::max(1u, std::thread::hardware_concurrency()));
    result.reps.resize(cfg.n_reps);

    if (deterministic) {
        PointConfig config = build_deterministic(cfg);
        if (config.points.empty())
            throw ConfigError("deterministic placement produced no points");
        std::unique_ptr<CholeskyFieldSampler> chol;
        std::unique_ptr<SpectralFieldSampler> spectral;
        if (cfg.sampler == SamplerKind::ExactCholesky)
            chol = std::make_unique<CholeskyFieldSampler>(cfg.correlation,
                                                          config.points);
        else
            spectral = std::make_unique<SpectralFieldSampler>(
                cfg.correlation, config.points,
                cfg.spectral_features > 0
                    ? cfg.spectral_features
                    : SpectralFieldSampler::kDefaultFeatures);
        parallel_reps(cfg.n_reps, result.workers_used, [&](long r) {
            Rng rng = rng_for_rep(cfg.seed, std::uint64_t(r));
            Eigen::VectorXd z =
                chol ? chol->sample(rng) : spectral->sample(rng);
            FieldSample field =
                make_field_sample(std::move(z), cfg.sigma, cfg.beta);
            SpectrumSample sp =
                realize_spectrum(params, config, field, cfg.thresholds);
            result.reps[r] = {std::move(sp.counts), long(config.points.size()),
                              chol ? chol->ridge() : 0.0};
        });
        result.realized_intensity_mean =
            double(config.points.size()) /
            (kPi * config.disc_radius * config.disc_radius);
    } else {
        double expected_n = cfg.kappa * kPi * cfg.disc_radius * cfg.disc_radius;
        if (cfg.sampler == SamplerKind::ExactCholesky &&
            cfg.correlation.kind != CorrKind::Nugget &&
            expected_n > double(kDenseLimit))
            throw InfeasibleSizeError(
                "expected " + std::to_string(long(expected_n)) +
                " points exceeds the per-replication dense factorization "
                "limit of " + std::to_string(kDenseLimit) +
                "; reduce the disc radius or use sampler = spectral");
        std::atomic<double> intensity_sum{0.0};
        parallel_reps(cfg.n_reps, result.workers_used, [&](long r) {
            Rng rng = rng_for_rep(cfg.seed, std::uint64_t(r));
            PointConfig config = draw_random(cfg, rng);
            double realized =
                double(config.points.size()) /
                (kPi * config.disc_radius * config.disc_radius);
            // Points whose marginal probability at the largest threshold is
            // below the cut cannot meaningfully contribute; dropping them
            // biases every count by at most n * active_cut in expectation.
            if (cfg.active_cut > 0.0) {
                std::erase_if(config.points, [&](const Point& x) {
                    return marginal_prob(params, x, t_max) < cfg.active_cut;
                });
            }
            const long n = long(config.points.size());
            Eigen::VectorXd z(n);
            double ridge = 0.0;
            if (cfg.correlation.kind == CorrKind::Nugget) {
                for (long i = 0; i < n; ++i) z(i) = draw_normal(rng);
            } else if (cfg.sampler == SamplerKind::ExactCholesky) {
                CholeskyFieldSampler sampler(cfg.correlation, config.points);
                z = sampler.sample(rng);
                ridge = sampler.ridge();
            } else {
                SpectralFieldSampler sampler(
                    cfg.correlation, config.points,
                    cfg.spectral_features > 0
                        ? cfg.spectral_features
                        : SpectralFieldSampler::kDefaultFeatures);
                z = sampler.sample(rng);
            }
            FieldSample field =
                make_field_sample(std::move(z), cfg.sigma, cfg.beta);
            SpectrumSample sp =
                realize_spectrum(params, config, field, cfg.thresholds);
            result.reps[r] = {std::move(sp.counts), n, ridge};
            double cur = intensity_sum.load();
            while (!intensity_sum.compare_exchange_weak(cur, cur + realized)) {
            }
        });
        result.realized_intensity_mean =
            intensity_sum.load() / double(cfg.n_reps);
    }

    for (const auto& rec : result.reps)
        if (rec.ridge > 0.0) ++result.ridge_events;

    if (cfg.n_reps >= 2) {
        for (size_t k = 0; k < cfg.thresholds.size(); ++k) {
            ThresholdSummary ts;
            ts.threshold = cfg.thresholds[k];
            std::vector<long> counts(cfg.n_reps);
            for (long r = 0; r < cfg.n_reps; ++r)
                counts[r] = result.reps[r].counts[k];
            ts.stats = count_stats(counts);
            if (deterministic) {
                PointConfig config = build_deterministic(cfg);
                ts.analytic_mean =
                    mean_measure_det(params, config, ts.threshold);
            } else {
                ts.analytic_mean = mean_measure_poisson_disc(
                    params, cfg.disc_radius, ts.threshold);
            }
            ts.dispersion =
                ts.stats.mean > 0.0 ? ts.stats.variance / ts.stats.mean : 0.0;
            ts.dtv = ts.analytic_mean > 0.0
                         ? dtv_counts(ts.stats, ts.analytic_mean)
                         : 0.0;
            result.summaries.push_back(std::move(ts));
        }
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
}

void write_replications_csv(const ExperimentResult& result, std::ostream& out) {
    out << "rep,threshold,count\n";
    char buf[96];
    for (size_t r = 0; r < result.reps.size(); ++r) {
        for (size_t k = 0; k < result.thresholds.size(); ++k) {
            snprintf(buf, sizeof buf, "%zu,%.17g,%ld\n", r,
                     result.thresholds[k], result.reps[r].counts[k]);
            out << buf;
        }
    }
}

void write_summary(const ExperimentConfig& cfg, const ExperimentResult& result,
                   std::ostream& out) {
    char buf[64];
    auto num = [&](double v) {
        snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    out << "placement = " << placement_kind_name(cfg.placement) << "\n";
    out << "correlation = " << corr_kind_name(cfg.correlation.kind) << "\n";
    out << "scale = " << num(cfg.correlation.scale) << "\n";
    out << "sigma = " << num(cfg.sigma) << "\n";
    out << "n_reps = " << result.reps.size() << "\n";
    out << "seed = " << result.seed << "\n";
    out << "workers = " << result.workers_used << "\n";
    out << "wall_seconds = " << num(result.wall_seconds) << "\n";
    out << "ridge_events = " << result.ridge_events << "\n";
    out << "realized_intensity_mean = " << num(result.realized_intensity_mean)
        << "\n";
    if (result.summaries.empty() && result.reps.size() < 2)
        out << "note = statistics need at least 2 replications\n";
    for (const auto& ts : result.summaries) {
        out << "\n[threshold " << num(ts.threshold) << "]\n";
        out << "analytic_mean = " << num(ts.analytic_mean) << "\n";
        out << "mean = " << num(ts.stats.mean) << "\n";
        out << "variance = " << num(ts.stats.variance) << "\n";
        out << "dispersion = " << num(ts.dispersion) << "\n";
        out << "dtv_counts = " << num(ts.dtv) << "\n";
    }
}

BoundReport run_bounds(const ExperimentConfig& cfg, bool tv) {
    validate(propagation_of(cfg));
    const PropagationParams params = propagation_of(cfg);
    BoundInputs in;
    in.params = params;
    in.model = cfg.correlation;
    in.t = cfg.bound_t > 0.0
               ? cfg.bound_t
               : (cfg.thresholds.empty() ? 1.0 : cfg.thresholds.back());
    in.R = cfg.bound_R;
    in.C = cfg.bound_C > 0.0 ? cfg.bound_C : cfg.disc_radius;
    in.bcase = cfg.bound_case;
    if (cfg.bound_case == BoundCase::Deterministic) {
        PointConfig config = build_deterministic(cfg);
        in.stats = geometry_stats(config, in.R);
        in.mean_measure = mean_measure_det(params, config, in.t);
        // exact truncation mass over the known configuration
        in.truncation_sum = 0.0;
        in.config_closed = true;
        for (const auto& x : config.points) {
            if (norm(x) > in.C) {
                in.config_closed = false;
                in.truncation_sum += 2.0 * marginal_prob(params, x, in.t);
            }
        }
        return tv ? dtv_bound_det(in) : d2_bound_det(in);
    }
    if (tv)
        throw ParameterError(
            "total variation bounds are only provided for fixed placements");
    Schedule sch = convergence_schedule(
        std::max(cfg.sigma, 1.0 + 1e-9), cfg.tail_exponent, params,
        cfg.bound_case == BoundCase::PoissonPlacement ? ScheduleCase::Poisson
                                                      : ScheduleCase::HardCore,
        cfg.correlation);
    in.d = cfg.bound_d > 0.0 ? cfg.bound_d : sch.d;
    if (cfg.bound_case == BoundCase::PoissonPlacement) {
        in.eps0 = cfg.bound_eps0 > 0.0 ? cfg.bound_eps0 : sch.eps0;
        in.eps_c = cfg.bound_eps_c > 0.0 ? cfg.bound_eps_c : sch.eps_c;
        in.t_star = cfg.bound_t_star;
        return d2_bound_poisson(in);
    }
    in.eps_star = cfg.hardcore_distance;
    in.mean_dev_mode = cfg.mean_dev_mode == MeanDevMode::Quadrature
                           ? MeanDevMode::MonteCarlo
                           : cfg.mean_dev_mode;
    in.gamma_plus = cfg.gamma_plus;
    in.mean_dev_reps = cfg.mean_dev_reps;
    in.mean_dev_seed = cfg.seed;
    return d2_bound_hardcore(in);
}

std::vector<SweepRow> run_bounds_sweep(const ExperimentConfig& cfg,
                                       const std::vector<double>& sigmas) {
    std::vector<SweepRow> rows;
    for (double sigma : sigmas) {
        ExperimentConfig c = cfg;
        c.sigma = sigma;
        ScheduleCase scase =
            cfg.bound_case == BoundCase::Deterministic ? ScheduleCase::DetD2
            : cfg.bound_case == BoundCase::PoissonPlacement
                ? ScheduleCase::Poisson
                : ScheduleCase::HardCore;
        Schedule sch = convergence_schedule(sigma, cfg.tail_exponent,
                                            propagation_of(c), scase,
                                            cfg.correlation);
        c.bound_C = sch.C;
        c.bound_R = sch.R;
        BoundReport rep = run_bounds(c);
        rows.push_back({sigma, rep.valid, rep.valid ? rep.total : 0.0});
    }
    return rows;
}

} // namespace sigspec
