#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "manifold_gfdm/surface_cloud.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

struct MaterialParams {
    double c = 0.0;    // wave speed, m/s
    double rho = 0.0;  // density, kg/m^3
    double mu = 0.0;   // shear modulus, Pa; always rho c^2

    static MaterialParams from_wave_speed(double c, double rho) {
        return MaterialParams{c, rho, rho * c * c};
    }
};

// Matrix/inclusion materials used across the studies.
inline MaterialParams epoxy() { return MaterialParams::from_wave_speed(1161.0, 1180.0); }
inline MaterialParams aurum() { return MaterialParams::from_wave_speed(1239.0, 19500.0); }

// Time-harmonic problem on a tagged cloud:
//   mu_j lap_S u + rho_j omega^2 u = g   in D_j
// with excitation u = C on GammaI, first-order absorbing rows on GammaA,
// zero Neumann on GammaN, Bloch-phase coupling across periodic pairs and
// continuity across interface pairs.
struct HelmholtzProblem {
    SurfaceCloud cloud;
    MaterialParams mat_d1;
    std::optional<MaterialParams> mat_d2;
    double omega = 0.0;
    std::function<Complex(const Vec3&)> source;  // null means g = 0
    Complex dirichlet_value{1e-5, 0.0};
    Complex bloch_phase{1.0, 0.0};
    int support = 40;                 // stencil size m
    bool row_equilibration = false;

    void validate() const {
        if (!(omega > 0.0)) throw Error("omega must be positive");
        if (std::abs(std::abs(bloch_phase) - 1.0) > 1e-12)
            throw Error("bloch phase must have unit modulus");
        if (support < 10 || support > 100)
            throw Error("support size m must lie in [10, 100]");
    }
};

}  // namespace mgfdm
