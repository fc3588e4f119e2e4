#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "manifold_gfdm/types.hpp"

namespace mgfdm {

// Level-set description of a surface S = { x : level_set(x) = 0 }.
// `gradient` is analytic where available, otherwise supply one via
// fd_gradient(). `analytic_hs` short-circuits the curvature-term evaluation
// for surfaces with a closed form.
struct ImplicitSurface {
    std::function<double(const Vec3&)> level_set;
    std::function<Vec3(const Vec3&)> gradient;
    std::function<double(const Vec3&)> analytic_hs;  // may be empty
    std::string name;
    double scale = 1.0;   // characteristic length, tolerances scale with it
    double h_fd = 1e-5;   // finite-difference step, relative to `scale`
};

inline std::function<Vec3(const Vec3&)> fd_gradient(std::function<double(const Vec3&)> f,
                                                    double h) {
    return [f = std::move(f), h](const Vec3& x) {
        Vec3 g;
        for (int i = 0; i < 3; ++i) {
            Vec3 e = Vec3::Zero();
            e[i] = h;
            g[i] = (f(x + e) - f(x - e)) / (2.0 * h);
        }
        return g;
    };
}

// Unit outward normal: gradient / |gradient|.
inline Vec3 normal_at(const ImplicitSurface& s, const Vec3& x) {
    const Vec3 g = s.gradient(x);
    const double n = g.norm();
    if (n < 1e-14 * s.scale)
        throw DegenerateGradient("degenerate level-set gradient on '" + s.name + "' at (" +
                                 std::to_string(x[0]) + ", " + std::to_string(x[1]) + ", " +
                                 std::to_string(x[2]) + ")");
    return g / n;
}

// Curvature term H_S(x) = tr(J(n)(I - n n^T)) with J the Jacobian of the unit
// normal field. Analytic when the surface provides it, else central
// differences of the normal field with step h_fd * scale.
inline double mean_curvature_term(const ImplicitSurface& s, const Vec3& x) {
    if (s.analytic_hs) return s.analytic_hs(x);
    const double h = s.h_fd * s.scale;
    Mat3 jac;
    for (int i = 0; i < 3; ++i) {
        Vec3 e = Vec3::Zero();
        e[i] = h;
        jac.col(i) = (normal_at(s, x + e) - normal_at(s, x - e)) / (2.0 * h);
    }
    const Vec3 n = normal_at(s, x);
    const Mat3 proj = Mat3::Identity() - n * n.transpose();
    return (jac * proj).trace();
}

// --- surface library ---

inline ImplicitSurface sphere_surface(double radius = 1.0) {
    ImplicitSurface s;
    s.level_set = [radius](const Vec3& x) { return x.squaredNorm() - radius * radius; };
    s.gradient = [](const Vec3& x) { return Vec3(2.0 * x); };
    s.analytic_hs = [radius](const Vec3&) { return 2.0 / radius; };
    s.name = "sphere";
    s.scale = radius;
    return s;
}

// Cylinder x1^2 + x3^2 = R^2, axis along x2.
inline ImplicitSurface cylinder_surface(double radius) {
    ImplicitSurface s;
    s.level_set = [radius](const Vec3& x) {
        return x[0] * x[0] + x[2] * x[2] - radius * radius;
    };
    s.gradient = [](const Vec3& x) { return Vec3(2.0 * x[0], 0.0, 2.0 * x[2]); };
    s.analytic_hs = [radius](const Vec3&) { return 1.0 / radius; };
    s.name = "cylinder";
    s.scale = radius;
    return s;
}

inline ImplicitSurface plane_surface() {
    ImplicitSurface s;
    s.level_set = [](const Vec3& x) { return x[2]; };
    s.gradient = [](const Vec3&) { return Vec3(0.0, 0.0, 1.0); };
    s.analytic_hs = [](const Vec3&) { return 0.0; };
    s.name = "plane";
    return s;
}

// Closed constant-distance-product surface: the product of distances to the
// four foci (+-1,0,0), (0,+-1,0) equals 1.1.
inline ImplicitSurface cdp_surface() {
    static const Vec3 foci[4] = {Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0)};
    ImplicitSurface s;
    s.level_set = [](const Vec3& x) {
        double p = 1.0;
        for (const Vec3& f : foci) p *= (x - f).norm();
        return p - 1.1;
    };
    // grad of prod_k |x-f_k| = prod * sum_k (x-f_k)/|x-f_k|^2
    s.gradient = [](const Vec3& x) {
        double p = 1.0;
        Vec3 sum = Vec3::Zero();
        for (const Vec3& f : foci) {
            const Vec3 d = x - f;
            const double q = d.squaredNorm();
            p *= std::sqrt(q);
            sum += d / q;
        }
        return Vec3(p * sum);
    };
    s.name = "cdp";
    return s;
}

// Rotation by alpha about the x2 axis: X = matrix * x, with
// X1 = cos(a) x1 - sin(a) x3, X2 = x2, X3 = sin(a) x1 + cos(a) x3.
struct RotationAboutX2 {
    double alpha = 0.0;
    Mat3 matrix = Mat3::Identity();

    static RotationAboutX2 from_angle(double alpha) {
        RotationAboutX2 r;
        r.alpha = alpha;
        const double c = std::cos(alpha), s = std::sin(alpha);
        r.matrix << c, 0, -s, 0, 1, 0, s, 0, c;
        return r;
    }

    Vec3 apply(const Vec3& x) const { return matrix * x; }
    Vec3 apply_inverse(const Vec3& x) const { return matrix.transpose() * x; }
};

}  // namespace mgfdm
