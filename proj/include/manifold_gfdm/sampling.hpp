#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>
#include <vector>

#include "manifold_gfdm/implicit_surface.hpp"
#include "manifold_gfdm/kdtree.hpp"
#include "manifold_gfdm/parallel.hpp"
#include "manifold_gfdm/surface_cloud.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

namespace detail {

// Riesz s=2 energy of a point set, sum over unordered pairs of 1/d^2.
inline double riesz_energy(const std::vector<Vec3>& pts) {
    const int n = static_cast<int>(pts.size());
    std::vector<double> partial(n, 0.0);
    parallel_for(n, [&](std::int64_t i) {
        double e = 0.0;
        for (int j = static_cast<int>(i) + 1; j < n; ++j)
            e += 1.0 / (pts[i] - pts[j]).squaredNorm();
        partial[i] = e;
    });
    double e = 0.0;
    for (double p : partial) e += p;
    return e;
}

// Tangential descent directions for the Riesz s=2 energy on the unit sphere.
inline void riesz_forces_sphere(const std::vector<Vec3>& pts, std::vector<Vec3>& force) {
    const int n = static_cast<int>(pts.size());
    force.assign(n, Vec3::Zero());
    parallel_for(n, [&](std::int64_t i) {
        Vec3 f = Vec3::Zero();
        for (int j = 0; j < n; ++j) {
            if (j == static_cast<int>(i)) continue;
            const Vec3 d = pts[i] - pts[j];
            const double d2 = d.squaredNorm();
            f += d / (d2 * d2);
        }
        force[i] = f - f.dot(pts[i]) * pts[i];
    });
}

}  // namespace detail

// Energy-descent smoothing of a unit-sphere point set (Riesz s=2, projected
// gradient with backtracking). Leaves the points on the sphere to machine
// precision.
inline void riesz_relax_sphere(std::vector<Vec3>& pts, int iters) {
    const int n = static_cast<int>(pts.size());
    if (n < 2 || iters <= 0) return;
    const double h = std::sqrt(4.0 * std::numbers::pi / n);

    std::vector<Vec3> force, trial(n);
    double energy = detail::riesz_energy(pts);
    double step = -1.0;
    for (int it = 0; it < iters; ++it) {
        detail::riesz_forces_sphere(pts, force);
        double fmax = 0.0;
        for (const Vec3& f : force) fmax = std::max(fmax, f.norm());
        if (fmax == 0.0) break;
        if (step < 0.0) step = 0.05 * h / fmax;

        bool accepted = false;
        for (int attempt = 0; attempt < 40 && !accepted; ++attempt) {
            double max_move = 0.0;
            for (int i = 0; i < n; ++i) {
                Vec3 d = step * force[i];
                const double dn = d.norm();
                if (dn > 0.25 * h) d *= 0.25 * h / dn;
                max_move = std::max(max_move, d.norm());
                trial[i] = (pts[i] + d).normalized();
            }
            const double e_trial = detail::riesz_energy(trial);
            if (e_trial <= energy) {
                pts.swap(trial);
                energy = e_trial;
                accepted = true;
                if (max_move < 1e-13) return;
            } else {
                step *= 0.5;
            }
        }
        if (!accepted) return;  // flat to machine precision
        step *= 1.3;
    }
}

// Quasi-uniform nodes on the unit sphere: offset Fibonacci lattice, then an
// optional Riesz-energy relaxation pass.
inline SurfaceCloud sample_sphere(int n, int relax_iters = 0) {
    if (n < 4) throw InvalidPatch("sphere sampling needs n >= 4");
    std::vector<Vec3> pts(n);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double a = golden * i;
        pts[i] = Vec3(r * std::cos(a), r * std::sin(a), z);
    }
    riesz_relax_sphere(pts, relax_iters);

    SurfaceCloud cloud;
    for (const Vec3& p : pts) cloud.append(p, p.normalized(), 2.0);
    for (auto& p : cloud.positions) p.normalize();
    cloud.spacing = std::sqrt(4.0 * std::numbers::pi / n);
    return cloud;
}

// Structured nodes on the cylinder patch x1^2 + x3^2 = R^2 spanned by the
// arc angle theta (centered on x3 = R) and |x2| <= lambda. Edge ids:
//   1: phi = -theta/2 (x1 = -R sin(theta/2))   3: phi = +theta/2
//   2: x2 = -lambda                            4: x2 = +lambda
// Corners belong to the arc-end edges 1/3. Conormals are analytic: axial
// edges +-(0,1,0), arc edges tangent to the circle pointing off the patch.
inline SurfaceCloud sample_cylinder_patch(double R, double theta, double lambda, double dh) {
    if (!(R > 0.0) || !(theta > 0.0) || theta > std::numbers::pi + 1e-12 || !(lambda > 0.0) ||
        !(dh > 0.0))
        throw InvalidPatch("cylinder patch requires R > 0, 0 < theta <= pi, lambda > 0, dh > 0");
    const int n_arc = static_cast<int>(std::lround(theta * R / dh)) + 1;
    const int n_ax = static_cast<int>(std::lround(2.0 * lambda / dh)) + 1;
    if (n_arc < 2 || n_ax < 2) throw InvalidPatch("cylinder patch spacing too coarse");

    SurfaceCloud cloud;
    cloud.positions.reserve(static_cast<size_t>(n_arc) * n_ax);
    for (int i = 0; i < n_arc; ++i) {
        const double phi = (i == 0)            ? -theta / 2.0
                           : (i == n_arc - 1) ? theta / 2.0
                                              : -theta / 2.0 + theta * i / (n_arc - 1);
        const double s = std::sin(phi), c = std::cos(phi);
        const Vec3 normal(s, 0.0, c);
        const Vec3 arc_tangent(c, 0.0, -s);
        for (int j = 0; j < n_ax; ++j) {
            const double x2 = (j == 0)           ? -lambda
                              : (j == n_ax - 1) ? lambda
                                                : -lambda + 2.0 * lambda * j / (n_ax - 1);
            int edge_id = 0;
            Vec3 conormal = Vec3::Zero();
            if (j == 0) {
                edge_id = 2;
                conormal = Vec3(0, -1, 0);
            } else if (j == n_ax - 1) {
                edge_id = 4;
                conormal = Vec3(0, 1, 0);
            }
            if (i == 0) {
                edge_id = 1;
                conormal = -arc_tangent;
            } else if (i == n_arc - 1) {
                edge_id = 3;
                conormal = arc_tangent;
            }
            cloud.append(Vec3(R * s, x2, R * c), normal, 1.0 / R, Region::Matrix,
                         edge_id == 0 ? Boundary::Interior : Boundary::GammaN, conormal,
                         edge_id);
        }
    }
    cloud.spacing = dh;
    return cloud;
}

// Flat strip in the plane x3 = 0, |x1| <= L/2, |x2| <= lambda: the zero
// curvature limit of the cylinder patch, same edge numbering.
inline SurfaceCloud sample_flat_strip(double L, double lambda, double dh) {
    if (!(L > 0.0) || !(lambda > 0.0) || !(dh > 0.0))
        throw InvalidPatch("flat strip requires L > 0, lambda > 0, dh > 0");
    const int n1 = static_cast<int>(std::lround(L / dh)) + 1;
    const int n2 = static_cast<int>(std::lround(2.0 * lambda / dh)) + 1;
    if (n1 < 2 || n2 < 2) throw InvalidPatch("flat strip spacing too coarse");

    SurfaceCloud cloud;
    cloud.positions.reserve(static_cast<size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i) {
        const double x1 =
            (i == 0) ? -L / 2.0 : (i == n1 - 1) ? L / 2.0 : -L / 2.0 + L * i / (n1 - 1);
        for (int j = 0; j < n2; ++j) {
            const double x2 = (j == 0)        ? -lambda
                              : (j == n2 - 1) ? lambda
                                              : -lambda + 2.0 * lambda * j / (n2 - 1);
            int edge_id = 0;
            Vec3 conormal = Vec3::Zero();
            if (j == 0) {
                edge_id = 2;
                conormal = Vec3(0, -1, 0);
            } else if (j == n2 - 1) {
                edge_id = 4;
                conormal = Vec3(0, 1, 0);
            }
            if (i == 0) {
                edge_id = 1;
                conormal = Vec3(-1, 0, 0);
            } else if (i == n1 - 1) {
                edge_id = 3;
                conormal = Vec3(1, 0, 0);
            }
            cloud.append(Vec3(x1, x2, 0.0), Vec3(0, 0, 1), 0.0, Region::Matrix,
                         edge_id == 0 ? Boundary::Interior : Boundary::GammaN, conormal,
                         edge_id);
        }
    }
    cloud.spacing = dh;
    return cloud;
}

struct LevelSetSampleOptions {
    int target_n = 4000;
    Vec3 box_lo = Vec3(-1, -1, -1);
    Vec3 box_hi = Vec3(1, 1, 1);
    unsigned seed = 42;
    int oversample = 30;    // candidates per requested node
    int relax_iters = 30;   // tangential Riesz smoothing sweeps
    double count_tol = 0.03;
};

namespace detail {

// Newton projection along the level-set gradient. Returns false when the
// iteration leaves the box or stalls.
inline bool project_to_surface(const ImplicitSurface& s, Vec3& x, const Vec3& lo,
                               const Vec3& hi, double tol) {
    for (int it = 0; it < 80; ++it) {
        const double phi = s.level_set(x);
        if (std::abs(phi) <= tol) return true;
        const Vec3 g = s.gradient(x);
        const double g2 = g.squaredNorm();
        if (g2 < 1e-28) return false;
        x -= phi / g2 * g;
        for (int k = 0; k < 3; ++k)
            if (x[k] < lo[k] - 1.0 || x[k] > hi[k] + 1.0) return false;
    }
    return false;
}

// Greedy Poisson-disk thinning with a uniform hash grid; keeps candidates in
// their original order, so the result is deterministic.
inline std::vector<int> poisson_thin(const std::vector<Vec3>& pts, double radius) {
    struct CellKey {
        long long x, y, z;
        bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
    };
    struct CellHash {
        size_t operator()(const CellKey& k) const {
            return static_cast<size_t>(k.x * 73856093LL ^ k.y * 19349663LL ^ k.z * 83492791LL);
        }
    };
    std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
    const double cell = radius;
    auto key_of = [cell](const Vec3& p) {
        return CellKey{static_cast<long long>(std::floor(p[0] / cell)),
                       static_cast<long long>(std::floor(p[1] / cell)),
                       static_cast<long long>(std::floor(p[2] / cell))};
    };
    std::vector<int> kept;
    const double r2 = radius * radius;
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
        const CellKey k = key_of(pts[i]);
        bool blocked = false;
        for (long long dx = -1; dx <= 1 && !blocked; ++dx)
            for (long long dy = -1; dy <= 1 && !blocked; ++dy)
                for (long long dz = -1; dz <= 1 && !blocked; ++dz) {
                    const auto it = grid.find(CellKey{k.x + dx, k.y + dy, k.z + dz});
                    if (it == grid.end()) continue;
                    for (int j : it->second)
                        if ((pts[i] - pts[j]).squaredNorm() < r2) {
                            blocked = true;
                            break;
                        }
                }
        if (!blocked) {
            kept.push_back(i);
            grid[k].push_back(i);
        }
    }
    return kept;
}

}  // namespace detail

// Quasi-uniform sampling of a closed implicit surface: project random box
// candidates onto the level set, thin to the requested count with a
// Poisson-disk radius found by bisection, then smooth tangentially.
inline SurfaceCloud sample_level_set(const ImplicitSurface& s,
                                     const LevelSetSampleOptions& opt) {
    if (opt.target_n < 10) throw InvalidPatch("level-set sampling needs target_n >= 10");
    const double proj_tol = 1e-13 * std::max(s.scale, 1.0);

    std::mt19937 rng(opt.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const long long want = static_cast<long long>(opt.oversample) * opt.target_n;
    std::vector<Vec3> seeds(want);
    for (auto& p : seeds)
        for (int k = 0; k < 3; ++k)
            p[k] = opt.box_lo[k] + (opt.box_hi[k] - opt.box_lo[k]) * u01(rng);

    std::vector<char> ok(seeds.size(), 0);
    parallel_for(static_cast<std::int64_t>(seeds.size()), [&](std::int64_t i) {
        ok[i] = detail::project_to_surface(s, seeds[i], opt.box_lo, opt.box_hi, proj_tol) ? 1 : 0;
    });
    std::vector<Vec3> candidates;
    candidates.reserve(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i)
        if (ok[i]) candidates.push_back(seeds[i]);
    if (static_cast<int>(candidates.size()) < 2 * opt.target_n)
        throw InvalidPatch("level-set sampling: too few candidates projected onto '" + s.name +
                           "'; enlarge the box or the oversample factor");

    // bisection on the thinning radius to land near target_n
    double lo = 0.0, hi = (opt.box_hi - opt.box_lo).norm();
    std::vector<int> kept;
    std::vector<int> best;
    double best_gap = std::numeric_limits<double>::max();
    for (int it = 0; it < 48; ++it) {
        const double r = (it == 0) ? hi * 0.01 : 0.5 * (lo + hi);
        kept = detail::poisson_thin(candidates, r);
        const double gap = std::abs(static_cast<double>(kept.size()) - opt.target_n);
        if (gap < best_gap) {
            best_gap = gap;
            best = kept;
        }
        if (gap <= opt.count_tol * opt.target_n) break;
        if (static_cast<int>(kept.size()) > opt.target_n)
            lo = r;  // too many survivors: grow the radius
        else
            hi = r;
        if (it == 0) {
            lo = 0.0;  // restart the bracket around the probe
            hi = r * 8.0;
        }
    }
    std::vector<Vec3> pts;
    pts.reserve(best.size());
    for (int i : best) pts.push_back(candidates[i]);
    const int n = static_cast<int>(pts.size());

    // tangential Riesz smoothing against the few nearest neighbors
    const int k_force = std::min(10, n - 1);
    for (int sweep = 0; sweep < opt.relax_iters; ++sweep) {
        KdTree tree(pts);
        std::vector<Vec3> moved(n);
        parallel_for(n, [&](std::int64_t i) {
            const auto nb = tree.knn(pts[i], k_force, static_cast<int>(i));
            Vec3 f = Vec3::Zero();
            double nearest = std::numeric_limits<double>::max();
            for (const auto& h : nb) {
                const Vec3 d = pts[i] - pts[h.index];
                const double d2 = std::max(h.dist2, 1e-30);
                f += d / (d2 * d2);
                nearest = std::min(nearest, std::sqrt(d2));
            }
            const Vec3 nrm = normal_at(s, pts[i]);
            Vec3 step = f - f.dot(nrm) * nrm;
            const double fn = step.norm();
            const double cap = 0.15 * nearest;
            if (fn * 0.05 * nearest * nearest * nearest * nearest > cap)
                step *= cap / fn;
            else
                step *= 0.05 * nearest * nearest * nearest * nearest;
            Vec3 q = pts[i] + step;
            if (!detail::project_to_surface(s, q, opt.box_lo, opt.box_hi, proj_tol))
                q = pts[i];
            moved[i] = q;
        });
        pts.swap(moved);
    }

    SurfaceCloud cloud;
    for (const Vec3& p : pts) {
        Vec3 q = p;
        detail::project_to_surface(s, q, opt.box_lo, opt.box_hi, proj_tol);
        cloud.append(q, normal_at(s, q), mean_curvature_term(s, q));
    }
    // nominal spacing: median nearest-neighbor distance
    if (n >= 2) {
        KdTree tree(cloud.positions);
        std::vector<double> nn(n);
        parallel_for(n, [&](std::int64_t i) {
            nn[i] = std::sqrt(tree.knn(cloud.positions[i], 1, static_cast<int>(i))[0].dist2);
        });
        std::nth_element(nn.begin(), nn.begin() + n / 2, nn.end());
        cloud.spacing = nn[n / 2];
    }
    return cloud;
}

}  // namespace mgfdm
