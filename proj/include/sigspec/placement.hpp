#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "sigspec/common.hpp"

namespace sigspec {

enum class PlacementKind { HexGrid, Poisson, HardCoreMatern2, Explicit };

const char* placement_kind_name(PlacementKind kind);
PlacementKind placement_kind_from_name(const std::string& name);

/// A finite transmitter configuration on a disc around the receiver at the
/// origin.  Every point is nonzero and lies within disc_radius.
struct PointConfig {
    std::vector<Point> points;
    double disc_radius = 0.0;   // km
    PlacementKind kind = PlacementKind::Explicit;
    double intensity = 0.0;     // km^-2, target or realized
};

/// Centers of a hexagonal tiling with cell area 1/kappa, clipped to the
/// closed disc of radius C.  The lattice is shifted by half a cell so no
/// point can land on the origin.
PointConfig gen_hex_grid(double kappa, double C);

/// Homogeneous Poisson configuration on the disc.
PointConfig gen_poisson(double kappa, double C, Rng& rng);

/// Hard-core configuration by dependent thinning of a Poisson parent: each
/// parent carries a uniform mark and survives iff its mark is the strict
/// minimum among parents within eps_star.  Parents are generated on the
/// enlarged disc C + eps_star and the result restricted to C, so the
/// boundary sees the same thinning pressure as the interior.
PointConfig gen_hardcore_matern2(double kappa_parent, double eps_star,
                                 double C, Rng& rng);

/// Expected retained intensity of the thinning above.
double matern2_intensity(double kappa_parent, double eps_star);

/// Parent intensity that realizes a target retained intensity; throws
/// ParameterError when the target saturates the hard-core packing.
double matern2_parent_for_target(double kappa_target, double eps_star);

/// One point per line, two coordinates in km, '#' starts a comment.
PointConfig load_points_file(const std::filesystem::path& path);
void save_points_file(const PointConfig& config,
                      const std::filesystem::path& path);

/// Geometry statistics consumed by the error bounds.  t_lower counts within
/// R of a configuration point, t_upper within 2R: any R-ball containing a
/// configuration point lies inside some such 2R-ball, so the continuum
/// maximum T(R) is bracketed by [t_lower, t_upper] and bounds use t_upper.
struct GeometryStats {
    double d_star = 0.0;   // min point norm
    double eps_min = 0.0;  // min pairwise distance (inf for < 2 points)
    long t_lower = 0;
    long t_upper = 0;
    double R = 0.0;
};

GeometryStats geometry_stats(const PointConfig& config, double R);

/// Points per annulus {R + (k-1) sqrt(3) R < |x - center| <= R + k sqrt(3) R},
/// k = 1, 2, ... out to the farthest configuration point.
std::vector<long> annulus_counts(const PointConfig& config, Point center,
                                 double R);

} // namespace sigspec
