#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "manifold_gfdm/implicit_surface.hpp"
#include "manifold_gfdm/surface_cloud.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

enum class InclusionMode { Hole, Inclusion };

// A circular disc region on a surface, given by local chart coordinates in
// which membership is |local(x)| < radius. `circle_point`/`circle_tangent`
// parameterize the rim curve for node placement and conormal construction.
struct SurfaceDisc {
    InclusionMode mode = InclusionMode::Hole;
    double radius = 0.0;
    std::function<Eigen::Vector2d(const Vec3&)> local;
    std::function<Vec3(double)> circle_point;
    std::function<Vec3(double)> circle_tangent;
    Vec3 center_point = Vec3::Zero();
};

// Disc on the cylinder x1^2 + x3^2 = R^2: membership X1^2 + (X2-c2)^2 < r^2
// in coordinates rotated by alpha about the x2 axis, so the disc is centered
// at arc angle alpha, x2 = c2.
inline SurfaceDisc cylinder_disc(double R, double alpha, double c2, double r,
                                 InclusionMode mode) {
    if (!(r > 0.0) || r >= R)
        throw InvalidPatch("cylinder disc requires 0 < r < R");
    SurfaceDisc d;
    d.mode = mode;
    d.radius = r;
    const RotationAboutX2 rot = RotationAboutX2::from_angle(alpha);
    d.local = [rot, c2](const Vec3& x) {
        const Vec3 X = rot.apply(x);
        return Eigen::Vector2d(X[0], X[1] - c2);
    };
    d.circle_point = [rot, R, c2, r](double t) {
        const double X1 = r * std::cos(t);
        return rot.apply_inverse(Vec3(X1, c2 + r * std::sin(t), std::sqrt(R * R - X1 * X1)));
    };
    d.circle_tangent = [rot, R, r](double t) {
        const double X1 = r * std::cos(t);
        const double dX1 = -r * std::sin(t);
        return rot.apply_inverse(
            Vec3(dX1, r * std::cos(t), -X1 * dX1 / std::sqrt(R * R - X1 * X1)));
    };
    d.center_point = rot.apply_inverse(Vec3(0.0, c2, R));
    return d;
}

// Disc in the plane x3 = 0 centered at (c1, c2).
inline SurfaceDisc flat_disc(double c1, double c2, double r, InclusionMode mode) {
    if (!(r > 0.0)) throw InvalidPatch("flat disc requires r > 0");
    SurfaceDisc d;
    d.mode = mode;
    d.radius = r;
    d.local = [c1, c2](const Vec3& x) { return Eigen::Vector2d(x[0] - c1, x[1] - c2); };
    d.circle_point = [c1, c2, r](double t) {
        return Vec3(c1 + r * std::cos(t), c2 + r * std::sin(t), 0.0);
    };
    d.circle_tangent = [r](double t) { return Vec3(-r * std::sin(t), r * std::cos(t), 0.0); };
    d.center_point = Vec3(c1, c2, 0.0);
    return d;
}

struct CarveOptions {
    double ring_gap = 0.45;   // clearing band around inclusion rims, in units of spacing
    double rim_width = 0.8;   // hole rim tagging band, in units of spacing
};

// Cuts discs out of a cloud. Holes remove the disc interior and tag the
// nearest retained ring of nodes as free-edge rim (Gamma0D1, conormal
// pointing into the hole). Inclusions retag the interior as D2, clear a thin
// band around the rim and insert coincident duplicate node pairs on the rim
// circle, one per material side, recorded in interface_pairs.
// Patch-edge nodes (edge != 0) are never removed. Periodic/interface pairs of
// the input cloud are not carried over; carve before pairing.
inline SurfaceCloud carve_and_classify(const SurfaceCloud& cloud, const ImplicitSurface& surface,
                                       const std::vector<SurfaceDisc>& discs,
                                       const CarveOptions& opt = {}) {
    const double dh = cloud.spacing;
    if (!(dh > 0.0)) throw InvalidPatch("carve_and_classify needs a cloud with known spacing");
    const int n = cloud.size();
    const int nd = static_cast<int>(discs.size());

    std::vector<char> remove(n, 0);
    std::vector<int> rim_disc(n, -1);       // hole rim membership
    std::vector<int> inside_disc(n, -1);    // strict interior membership
    for (int i = 0; i < n; ++i) {
        const Vec3& p = cloud.positions[i];
        for (int k = 0; k < nd; ++k) {
            const SurfaceDisc& d = discs[k];
            const double dist = d.local(p).norm();
            if (dist < d.radius) {
                if (inside_disc[i] >= 0)
                    throw OverlappingInclusions("node " + std::to_string(i) +
                                                " claimed by discs " +
                                                std::to_string(inside_disc[i]) + " and " +
                                                std::to_string(k));
                inside_disc[i] = k;
            }
            if (d.mode == InclusionMode::Hole) {
                if (dist < d.radius) remove[i] = 1;
                else if (dist < d.radius + opt.rim_width * dh && rim_disc[i] < 0)
                    rim_disc[i] = k;
            } else {
                if (std::abs(dist - d.radius) < opt.ring_gap * dh) remove[i] = 1;
            }
        }
        if (cloud.edge[i] != 0) remove[i] = 0;  // patch edges survive carving
    }

    SurfaceCloud out;
    out.spacing = dh;
    for (int i = 0; i < n; ++i) {
        if (remove[i]) continue;
        Region reg = cloud.region[i];
        Boundary b = cloud.boundary[i];
        Vec3 conormal = cloud.conormals[i];
        if (inside_disc[i] >= 0 && discs[inside_disc[i]].mode == InclusionMode::Inclusion)
            reg = Region::Inclusion;
        if (rim_disc[i] >= 0 && b == Boundary::Interior) {
            const SurfaceDisc& d = discs[rim_disc[i]];
            const Vec3& nrm = cloud.normals[i];
            Vec3 toward = d.center_point - cloud.positions[i];
            toward -= toward.dot(nrm) * nrm;
            b = Boundary::Gamma0D1;
            conormal = toward.normalized();
        }
        out.append(cloud.positions[i], cloud.normals[i], cloud.hs_values[i], reg, b, conormal,
                   cloud.edge[i]);
    }

    // duplicate node rings on inclusion interfaces
    for (int k = 0; k < nd; ++k) {
        const SurfaceDisc& d = discs[k];
        if (d.mode != InclusionMode::Inclusion) continue;
        const int n_ring =
            std::max(8, static_cast<int>(std::lround(2.0 * std::numbers::pi * d.radius / dh)));
        for (int j = 0; j < n_ring; ++j) {
            const double t = 2.0 * std::numbers::pi * j / n_ring;
            const Vec3 p = d.circle_point(t);
            const Vec3 nrm = normal_at(surface, p);
            const double hs = mean_curvature_term(surface, p);
            Vec3 tau = d.circle_tangent(t);
            Vec3 conormal = nrm.cross(tau).normalized();
            Vec3 toward = d.center_point - p;
            toward -= toward.dot(nrm) * nrm;
            if (conormal.dot(toward) < 0.0) conormal = -conormal;  // D1 side points into D2
            const int i1 = out.size();
            out.append(p, nrm, hs, Region::Matrix, Boundary::Gamma0D1, conormal);
            out.append(p, nrm, hs, Region::Inclusion, Boundary::Gamma0D2, -conormal);
            out.interface_pairs.emplace_back(i1, i1 + 1);
        }
    }
    return out;
}

// Filling fraction F_f = pi r^2 of one inclusion disc per unit cell.
inline double filling_fraction_radius(double ff) {
    if (!(ff > 0.0)) throw InvalidPatch("filling fraction must be positive");
    return std::sqrt(ff / std::numbers::pi);
}

// Matches every GammaP1 node to the GammaP2 node at x + a (within tol) and
// stores the pairs. Fails if any node on either side is left unmatched or
// claimed twice.
inline SurfaceCloud pair_periodic(const SurfaceCloud& cloud, const Vec3& a, double tol) {
    const auto p1 = cloud.nodes_with(Boundary::GammaP1);
    const auto p2 = cloud.nodes_with(Boundary::GammaP2);
    if (p1.empty() || p2.empty())
        throw UnmatchedPeriodicNode("periodic pairing requires GammaP1 and GammaP2 nodes");
    if (p1.size() != p2.size())
        throw UnmatchedPeriodicNode("periodic side counts differ: " + std::to_string(p1.size()) +
                                    " vs " + std::to_string(p2.size()));

    SurfaceCloud out = cloud;
    out.periodic_pairs.clear();
    std::vector<char> used(p2.size(), 0);
    for (int i : p1) {
        const Vec3 target = cloud.positions[i] + a;
        double best = std::numeric_limits<double>::max();
        int best_k = -1;
        for (size_t k = 0; k < p2.size(); ++k) {
            const double dist = (cloud.positions[p2[k]] - target).norm();
            if (dist < best) {
                best = dist;
                best_k = static_cast<int>(k);
            }
        }
        if (best_k < 0 || best > tol)
            throw UnmatchedPeriodicNode("no translate within tolerance for node " +
                                        std::to_string(i));
        if (used[best_k])
            throw UnmatchedPeriodicNode("two nodes map onto GammaP2 node " +
                                        std::to_string(p2[best_k]));
        used[best_k] = 1;
        out.periodic_pairs.emplace_back(i, p2[best_k]);
    }
    return out;
}

}  // namespace mgfdm
