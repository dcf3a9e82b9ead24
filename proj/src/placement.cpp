#include "sigspec/placement.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "sigspec/numerics.hpp"

namespace sigspec {

namespace {
constexpr double kPi = 3.141592653589793;
}

const char* placement_kind_name(PlacementKind kind) {
    switch (kind) {
        case PlacementKind::HexGrid: return "hex";
        case PlacementKind::Poisson: return "poisson";
        case PlacementKind::HardCoreMatern2: return "hardcore";
        case PlacementKind::Explicit: return "explicit";
    }
    return "?";
}

PlacementKind placement_kind_from_name(const std::string& name) {
    if (name == "hex") return PlacementKind::HexGrid;
    if (name == "poisson") return PlacementKind::Poisson;
    if (name == "hardcore") return PlacementKind::HardCoreMatern2;
    if (name == "explicit") return PlacementKind::Explicit;
    throw ParameterError("unknown placement kind: " + name);
}

PointConfig gen_hex_grid(double kappa, double C) {
    if (!(kappa > 0.0) || !(C > 0.0))
        throw ParameterError("gen_hex_grid: kappa and C must be positive");
    // Triangular lattice of cell centers: lattice constant a gives cell area
    // (sqrt(3)/2) a^2 = 1/kappa.  Shift by (a/2, sqrt(3) a / 4): every row
    // then sits at |y| >= sqrt(3) a / 4, keeping the origin clear.
    const double a = std::sqrt(2.0 / (std::sqrt(3.0) * kappa));
    const double row_h = 0.5 * std::sqrt(3.0) * a;
    const double ox = 0.5 * a;
    const double oy = 0.5 * row_h;
    PointConfig cfg;
    cfg.kind = PlacementKind::HexGrid;
    cfg.disc_radius = C;
    cfg.intensity = kappa;
    const long jmax = long(std::ceil((C + row_h) / row_h));
    const long imax = long(std::ceil((C + a) / a));
    for (long j = -jmax; j <= jmax; ++j) {
        double y = j * row_h + oy;
        double xoff = (j & 1) ? 0.5 * a : 0.0;
        for (long i = -imax; i <= imax; ++i) {
            double x = i * a + xoff + ox;
            if (x * x + y * y <= C * C) cfg.points.push_back({x, y});
        }
    }
    return cfg;
}

PointConfig gen_poisson(double kappa, double C, Rng& rng) {
    if (!(kappa > 0.0) || !(C > 0.0))
        throw ParameterError("gen_poisson: kappa and C must be positive");
    PointConfig cfg;
    cfg.kind = PlacementKind::Poisson;
    cfg.disc_radius = C;
    cfg.intensity = kappa;
    long n = draw_poisson(kappa * kPi * C * C, rng);
    cfg.points.reserve(n);
    while (long(cfg.points.size()) < n) {
        double r = C * std::sqrt(draw_uniform(rng));
        double phi = 2.0 * kPi * draw_uniform(rng);
        Point p{r * std::cos(phi), r * std::sin(phi)};
        if (p.x == 0.0 && p.y == 0.0) continue; // measure-zero, resample
        cfg.points.push_back(p);
    }
    return cfg;
}

double matern2_intensity(double kappa_parent, double eps_star) {
    double a = kPi * eps_star * eps_star;
    return -std::expm1(-kappa_parent * a) / a;
}

double matern2_parent_for_target(double kappa_target, double eps_star) {
    double a = kPi * eps_star * eps_star;
    double x = kappa_target * a;
    if (x >= 1.0)
        throw ParameterError(
            "hard-core target intensity exceeds the thinning saturation "
            "1/(pi eps*^2)");
    return -std::log1p(-x) / a;
}

PointConfig gen_hardcore_matern2(double kappa_parent, double eps_star,
                                 double C, Rng& rng) {
    if (!(kappa_parent > 0.0) || !(eps_star > 0.0) || !(C > 0.0))
        throw ParameterError("gen_hardcore_matern2: parameters must be positive");
    const double Cp = C + eps_star;
    long n = draw_poisson(kappa_parent * kPi * Cp * Cp, rng);
    std::vector<Point> parents;
    std::vector<double> marks;
    parents.reserve(n);
    marks.reserve(n);
    for (long i = 0; i < n; ++i) {
        double r = Cp * std::sqrt(draw_uniform(rng));
        double phi = 2.0 * kPi * draw_uniform(rng);
        parents.push_back({r * std::cos(phi), r * std::sin(phi)});
        marks.push_back(draw_uniform(rng));
    }
    PointConfig cfg;
    cfg.kind = PlacementKind::HardCoreMatern2;
    cfg.disc_radius = C;
    cfg.intensity = matern2_intensity(kappa_parent, eps_star);
    const double eps2 = eps_star * eps_star;
    for (long i = 0; i < n; ++i) {
        if (norm(parents[i]) > C) continue;
        if (parents[i].x == 0.0 && parents[i].y == 0.0) continue;
        bool keep = true;
        for (long j = 0; j < n && keep; ++j) {
            if (j == i) continue;
            double dx = parents[i].x - parents[j].x;
            double dy = parents[i].y - parents[j].y;
            if (dx * dx + dy * dy > eps2) continue;
            // strict mark minimum, index as the (measure-zero) tiebreak
            if (marks[j] < marks[i] || (marks[j] == marks[i] && j < i))
                keep = false;
        }
        if (keep) cfg.points.push_back(parents[i]);
    }
    return cfg;
}

PointConfig load_points_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open points file: " + path.string());
    PointConfig cfg;
    cfg.kind = PlacementKind::Explicit;
    std::string line;
    double max_r = 0.0;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        double x, y;
        if (sscanf(line.c_str(), "%lf %lf", &x, &y) != 2)
            throw ConfigError("bad line in points file: " + line);
        if (x == 0.0 && y == 0.0)
            throw DegenerateConfigError("points file contains the origin");
        cfg.points.push_back({x, y});
        max_r = std::max(max_r, norm({x, y}));
    }
    cfg.disc_radius = max_r;
    if (!cfg.points.empty())
        cfg.intensity = double(cfg.points.size()) / (kPi * max_r * max_r);
    return cfg;
}

void save_points_file(const PointConfig& config,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write points file: " + path.string());
    out << "# " << placement_kind_name(config.kind) << ", "
        << config.points.size() << " points, disc radius "
        << config.disc_radius << " km\n";
    char buf[80];
    for (const auto& p : config.points) {
        snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
        out << buf;
    }
}

GeometryStats geometry_stats(const PointConfig& config, double R) {
    if (config.points.empty())
        throw DegenerateConfigError("geometry_stats: empty configuration");
    if (!(R > 0.0)) throw ParameterError("geometry_stats: R must be positive");
    GeometryStats st;
    st.R = R;
    st.d_star = std::numeric_limits<double>::infinity();
    st.eps_min = std::numeric_limits<double>::infinity();
    const auto& pts = config.points;
    const long n = long(pts.size());
    const double r2 = R * R, r4 = 4.0 * R * R;
    for (long i = 0; i < n; ++i) {
        st.d_star = std::min(st.d_star, norm(pts[i]));
        long near = 1, wide = 1;
        for (long j = 0; j < n; ++j) {
            if (j == i) continue;
            double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
            double d2 = dx * dx + dy * dy;
            if (j > i) st.eps_min = std::min(st.eps_min, std::sqrt(d2));
            if (d2 <= r2) ++near;
            if (d2 <= r4) ++wide;
        }
        st.t_lower = std::max(st.t_lower, near);
        st.t_upper = std::max(st.t_upper, wide);
    }
    return st;
}

std::vector<long> annulus_counts(const PointConfig& config, Point center,
                                 double R) {
    if (!(R > 0.0)) throw ParameterError("annulus_counts: R must be positive");
    const double w = std::sqrt(3.0) * R;
    std::vector<long> counts;
    for (const auto& p : config.points) {
        double d = dist(p, center);
        if (d <= R) continue;
        long k = long(std::ceil((d - R) / w));
        if (long(counts.size()) < k) counts.resize(k, 0);
        ++counts[k - 1];
    }
    return counts;
}

} // namespace sigspec
