// Command-line front end: simulate experiments, evaluate error bounds, and
// run the point-process diagnostics.  Exit status 0 on success, 1 on usage
// errors, 2 when a precondition or validity check fails.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "sigspec/bounds.hpp"
#include "sigspec/harness.hpp"
#include "sigspec/metrics.hpp"
#include "sigspec/numerics.hpp"
#include "sigspec/spectrum.hpp"

namespace fs = std::filesystem;
using namespace sigspec;

namespace {

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--seed", flags.seed, "override the config seed");
    cmd->add_option("--workers", flags.workers, "override the worker count");
    cmd->add_option("--out", flags.out, "override the output prefix");
}

ExperimentConfig load_with_overrides(const std::string& path,
                                     const CommonFlags& flags) {
    ExperimentConfig cfg = load_config(path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.workers) cfg.workers = *flags.workers;
    if (flags.out) cfg.out_prefix = *flags.out;
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write " + path);
    return out;
}

std::vector<double> read_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream row(line);
        double v;
        while (row >> v) values.push_back(v);
    }
    return values;
}

int cmd_simulate(const std::string& config_path, const CommonFlags& flags) {
    ExperimentConfig cfg = load_with_overrides(config_path, flags);
    ExperimentResult result = run_experiment(cfg);
    {
        auto csv = open_out(cfg.out_prefix + ".csv");
        write_replications_csv(result, csv);
    }
    {
        auto summary = open_out(cfg.out_prefix + "_summary.txt");
        write_summary(cfg, result, summary);
    }
    write_summary(cfg, result, std::cout);
    std::cout << "\nwrote " << cfg.out_prefix << ".csv and "
              << cfg.out_prefix << "_summary.txt\n";
    return 0;
}

int cmd_bounds(const std::string& config_path, const CommonFlags& flags,
               const std::string& case_override, const std::string& sweep,
               bool tv) {
    ExperimentConfig cfg = load_with_overrides(config_path, flags);
    if (!case_override.empty()) {
        if (case_override == "det") cfg.bound_case = BoundCase::Deterministic;
        else if (case_override == "poisson") cfg.bound_case = BoundCase::PoissonPlacement;
        else if (case_override == "hardcore") cfg.bound_case = BoundCase::HardCore;
        else throw CLI::ValidationError("--case must be det, poisson or hardcore");
    }
    if (!sweep.empty()) {
        double lo, hi;
        int n;
        if (sscanf(sweep.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 2 ||
            !(hi > lo))
            throw CLI::ValidationError("--sigma-sweep expects lo:hi:n");
        std::vector<double> sigmas(n);
        for (int i = 0; i < n; ++i)
            sigmas[i] = lo + (hi - lo) * double(i) / double(n - 1);
        auto rows = run_bounds_sweep(cfg, sigmas);
        auto out = open_out(cfg.out_prefix + "_sweep.txt");
        std::cout << "sigma  valid  total\n";
        out << "sigma  valid  total\n";
        for (const auto& row : rows) {
            char buf[96];
            snprintf(buf, sizeof buf, "%-7g %-6d %.6g\n", row.sigma,
                     row.valid ? 1 : 0, row.total);
            std::cout << buf;
            out << buf;
        }
        return 0;
    }
    BoundReport rep = run_bounds(cfg, tv);
    write_bound_report(rep, std::cout);
    {
        auto out = open_out(cfg.out_prefix + "_bounds.txt");
        write_bound_report(rep, out);
    }
    {
        auto out = open_out(cfg.out_prefix + "_bounds.kv");
        write_bound_report_kv(rep, out);
    }
    return rep.valid ? 0 : 2;
}

int cmd_upd(const std::string& model_name, double scale, double nu, int dim,
            double eps) {
    CorrelationModel model;
    model.kind = corr_kind_from_name(model_name);
    model.scale = scale;
    model.smoothness = nu;
    model.dimension = dim;
    printf("%.12g\n", upd_delta(model, eps));
    return 0;
}

int cmd_ospa(const std::string& file1, const std::string& file2, double t) {
    auto a = read_value_file(file1);
    auto b = read_value_file(file2);
    for (double v : a)
        if (v < 0.0 || v > t)
            throw ParameterError("ospa: value outside [0, t] in " + file1);
    for (double v : b)
        if (v < 0.0 || v > t)
            throw ParameterError("ospa: value outside [0, t] in " + file2);
    printf("%.12g\n", ospa(a, b));
    return 0;
}

int cmd_ppdata(const std::string& result_file, double t, double mean,
               const CommonFlags& flags) {
    std::ifstream in(result_file);
    if (!in) throw ConfigError("cannot open " + result_file);
    std::string line;
    if (!std::getline(in, line) || line.rfind("rep,threshold,count", 0) != 0)
        throw ConfigError("not a replication CSV: " + result_file);
    std::vector<long> counts;
    while (std::getline(in, line)) {
        long rep, count;
        double threshold;
        if (sscanf(line.c_str(), "%ld,%lf,%ld", &rep, &threshold, &count) != 3)
            throw ConfigError("bad CSV row: " + line);
        if (threshold == t ||
            std::fabs(threshold - t) <= 1e-12 * std::fabs(t))
            counts.push_back(count);
    }
    if (counts.size() < 2)
        throw ParameterError("ppdata: no (or too few) rows at that threshold");
    CountStats stats = count_stats(counts);
    double mu = mean > 0.0 ? mean : stats.mean;
    auto pts = pp_points(stats, mu);
    std::string out_path =
        (flags.out ? *flags.out : result_file + ".pp") + std::string(".csv");
    auto out = open_out(out_path);
    out << "k,ecdf,pcdf\n";
    printf("k,ecdf,pcdf\n");
    for (const auto& p : pts) {
        char buf[96];
        snprintf(buf, sizeof buf, "%ld,%.12g,%.12g\n", p.k, p.ecdf, p.pcdf);
        out << buf;
        printf("%s", buf);
    }
    return 0;
}

int cmd_meanmeasure(const std::string& config_path, double t,
                    const CommonFlags& flags) {
    ExperimentConfig cfg = load_with_overrides(config_path, flags);
    PropagationParams params = propagation_of(cfg);
    double tt = t > 0.0 ? t
                        : (cfg.thresholds.empty() ? 1.0 : cfg.thresholds.back());
    printf("L(t) = %.12g\n", mean_measure_limit(params, tt));
    if (cfg.placement == PlacementKind::Poisson ||
        cfg.placement == PlacementKind::HardCoreMatern2) {
        printf("M_disc(t) = %.12g\n",
               mean_measure_poisson_disc(params, cfg.disc_radius, tt));
    } else {
        PointConfig config = cfg.placement == PlacementKind::HexGrid
                                 ? gen_hex_grid(cfg.kappa, cfg.disc_radius)
                                 : load_points_file(cfg.points_file);
        printf("M_det(t) = %.12g\n", mean_measure_det(params, config, tt));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"signal-spectrum simulation and Poisson-approximation bounds"};
    app.require_subcommand(1);

    CommonFlags flags;

    std::string config_path;
    auto* simulate = app.add_subcommand("simulate", "run a seeded experiment");
    simulate->add_option("config", config_path, "experiment config file")
        ->required();
    add_common(simulate, flags);

    std::string bounds_config, bounds_case, sweep;
    bool bounds_tv = false;
    auto* bounds = app.add_subcommand("bounds", "evaluate the error bounds");
    bounds->add_option("config", bounds_config, "experiment config file")
        ->required();
    bounds->add_option("--case", bounds_case, "det | poisson | hardcore");
    bounds->add_option("--sigma-sweep", sweep,
                       "evaluate the scheduled bound over lo:hi:n");
    bounds->add_flag("--tv", bounds_tv, "total variation bound (det only)");
    add_common(bounds, flags);

    std::string upd_model = "exponential";
    double upd_scale = 1.0, upd_nu = 0.5, upd_eps = 0.0;
    int upd_dim = 2;
    auto* upd = app.add_subcommand(
        "upd", "print the uniform positive definiteness constant");
    upd->add_option("--model", upd_model, "correlation kind")->required();
    upd->add_option("--scale", upd_scale, "decorrelation distance (km)");
    upd->add_option("--nu", upd_nu, "Matern smoothness");
    upd->add_option("--dim", upd_dim, "ambient dimension");
    upd->add_option("--eps", upd_eps, "minimum point separation (km)")
        ->required();

    std::string ospa_a, ospa_b;
    double ospa_t = 1.0;
    auto* ospa_cmd =
        app.add_subcommand("ospa", "distance between two point files");
    ospa_cmd->add_option("file1", ospa_a)->required();
    ospa_cmd->add_option("file2", ospa_b)->required();
    ospa_cmd->add_option("--t", ospa_t, "window [0, t]")->required();

    std::string pp_file;
    double pp_t = 0.0, pp_mean = 0.0;
    auto* ppdata =
        app.add_subcommand("ppdata", "P-P data from a replication CSV");
    ppdata->add_option("result", pp_file, "replication CSV")->required();
    ppdata->add_option("--t", pp_t, "threshold to extract")->required();
    ppdata->add_option("--mean", pp_mean,
                       "Poisson mean (default: empirical mean)");
    add_common(ppdata, flags);

    std::string mm_config;
    double mm_t = 0.0;
    auto* meanmeasure =
        app.add_subcommand("meanmeasure", "print mean-measure values");
    meanmeasure->add_option("config", mm_config)->required();
    meanmeasure->add_option("--t", mm_t, "threshold (default: largest)");
    add_common(meanmeasure, flags);

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(config_path, flags);
        if (bounds->parsed())
            return cmd_bounds(bounds_config, flags, bounds_case, sweep,
                              bounds_tv);
        if (upd->parsed())
            return cmd_upd(upd_model, upd_scale, upd_nu, upd_dim, upd_eps);
        if (ospa_cmd->parsed()) return cmd_ospa(ospa_a, ospa_b, ospa_t);
        if (ppdata->parsed()) return cmd_ppdata(pp_file, pp_t, pp_mean, flags);
        if (meanmeasure->parsed())
            return cmd_meanmeasure(mm_config, mm_t, flags);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
