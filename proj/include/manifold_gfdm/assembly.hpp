#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "manifold_gfdm/io.hpp"
#include "manifold_gfdm/operators.hpp"
#include "manifold_gfdm/problem.hpp"
#include "manifold_gfdm/stencil.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

// One row per unknown; interface duplicates count separately, so the matrix
// is square by construction.
struct SparseSystem {
    int n = 0;
    std::vector<Eigen::Triplet<Complex>> triplets;
    Eigen::VectorXcd rhs;

    Eigen::SparseMatrix<Complex> matrix() const {
        Eigen::SparseMatrix<Complex> a(n, n);
        a.setFromTriplets(triplets.begin(), triplets.end());
        return a;
    }
};

namespace detail {

inline void add_row(std::vector<Eigen::Triplet<Complex>>& triplets, int row,
                    const OperatorRow& op, Complex factor) {
    for (size_t k = 0; k < op.cols.size(); ++k)
        triplets.emplace_back(row, op.cols[k], factor * op.coeffs[k]);
}

inline const StencilWeights& stencil_at(const std::vector<StencilWeights>& st, int i) {
    if (i < 0 || i >= static_cast<int>(st.size()) || st[i].center != i)
        throw MissingStencil("no stencil available at node " + std::to_string(i));
    return st[i];
}

}  // namespace detail

// Assembles the block system: governing rows in the bulk, one boundary or
// coupling row per tagged node. Periodic and interface pairs carry the value
// row on the "2" member and the flux row on the "1" member.
inline SparseSystem assemble(const HelmholtzProblem& p,
                             const std::vector<StencilWeights>& stencils) {
    p.validate();
    const SurfaceCloud& cloud = p.cloud;
    const int n = cloud.size();

    std::vector<int> periodic_partner(n, -1), interface_partner(n, -1);
    for (const auto& [a, b] : cloud.periodic_pairs) {
        periodic_partner[a] = b;
        periodic_partner[b] = a;
    }
    for (const auto& [a, b] : cloud.interface_pairs) {
        interface_partner[a] = b;
        interface_partner[b] = a;
    }

    const MaterialParams& m1 = p.mat_d1;
    auto material = [&](int i) -> const MaterialParams& {
        if (cloud.region[i] == Region::Matrix) return m1;
        if (!p.mat_d2) throw Error("inclusion nodes present but mat_d2 is not set");
        return *p.mat_d2;
    };

    SparseSystem sys;
    sys.n = n;
    sys.rhs = Eigen::VectorXcd::Zero(n);
    sys.triplets.reserve(static_cast<size_t>(n) * (p.support + 2));
    const Complex iw_over_c(0.0, p.omega / m1.c);

    for (int i = 0; i < n; ++i) {
        switch (cloud.boundary[i]) {
            case Boundary::Interior: {
                const MaterialParams& mat = material(i);
                const auto lb =
                    laplace_beltrami_row(detail::stencil_at(stencils, i), cloud.normals[i],
                                         cloud.hs_values[i]);
                detail::add_row(sys.triplets, i, lb, Complex(mat.mu, 0.0));
                sys.triplets.emplace_back(i, i, Complex(mat.rho * p.omega * p.omega, 0.0));
                sys.rhs[i] = p.source ? p.source(cloud.positions[i]) : Complex(0.0, 0.0);
                break;
            }
            case Boundary::GammaI:
                sys.triplets.emplace_back(i, i, Complex(1.0, 0.0));
                sys.rhs[i] = p.dirichlet_value;
                break;
            case Boundary::GammaA: {
                const auto row = conormal_derivative_row(detail::stencil_at(stencils, i),
                                                         cloud.conormals[i]);
                detail::add_row(sys.triplets, i, row, Complex(1.0, 0.0));
                sys.triplets.emplace_back(i, i, -iw_over_c);
                break;
            }
            case Boundary::GammaN: {
                const auto row = conormal_derivative_row(detail::stencil_at(stencils, i),
                                                         cloud.conormals[i]);
                detail::add_row(sys.triplets, i, row, Complex(1.0, 0.0));
                break;
            }
            case Boundary::GammaP1: {
                const int j = periodic_partner[i];
                if (j < 0) throw UntaggedNode("GammaP1 node " + std::to_string(i) + " unpaired");
                // flux row, common translation direction: the stored outward
                // conormals of a pair are opposed, so the phase-carrying term
                // enters with a plus sign.
                if ((cloud.conormals[i] + cloud.conormals[j]).norm() > 1e-8)
                    throw Error("periodic pair conormals are not opposed");
                const auto row_i = conormal_derivative_row(detail::stencil_at(stencils, i),
                                                           cloud.conormals[i]);
                const auto row_j = conormal_derivative_row(detail::stencil_at(stencils, j),
                                                           cloud.conormals[j]);
                detail::add_row(sys.triplets, i, row_j, Complex(m1.mu, 0.0));
                detail::add_row(sys.triplets, i, row_i, p.bloch_phase * m1.mu);
                break;
            }
            case Boundary::GammaP2: {
                const int j = periodic_partner[i];
                if (j < 0) throw UntaggedNode("GammaP2 node " + std::to_string(i) + " unpaired");
                // value row u_p2 = phase * u_p1
                sys.triplets.emplace_back(i, i, Complex(1.0, 0.0));
                sys.triplets.emplace_back(i, j, -p.bloch_phase);
                break;
            }
            case Boundary::Gamma0D1: {
                const int j = interface_partner[i];
                const auto row_i = conormal_derivative_row(detail::stencil_at(stencils, i),
                                                           cloud.conormals[i]);
                if (j < 0) {
                    // hole rim: traction-free edge
                    detail::add_row(sys.triplets, i, row_i, Complex(m1.mu, 0.0));
                } else {
                    // flux continuity across the interface; opposed conormals
                    const auto row_j = conormal_derivative_row(detail::stencil_at(stencils, j),
                                                               cloud.conormals[j]);
                    detail::add_row(sys.triplets, i, row_i, Complex(m1.mu, 0.0));
                    detail::add_row(sys.triplets, i, row_j, Complex(material(j).mu, 0.0));
                }
                break;
            }
            case Boundary::Gamma0D2: {
                const int j = interface_partner[i];
                if (j < 0)
                    throw UntaggedNode("interface node " + std::to_string(i) +
                                       " has no duplicate partner");
                // value continuity u^1 - u^2 = 0
                sys.triplets.emplace_back(i, j, Complex(1.0, 0.0));
                sys.triplets.emplace_back(i, i, Complex(-1.0, 0.0));
                break;
            }
            default:
                throw UntaggedNode("node " + std::to_string(i) + " carries an unknown tag");
        }
    }

    if (p.row_equilibration) {
        std::vector<double> row_max(n, 0.0);
        const auto a = sys.matrix();
        for (int k = 0; k < a.outerSize(); ++k)
            for (Eigen::SparseMatrix<Complex>::InnerIterator it(a, k); it; ++it)
                row_max[it.row()] = std::max(row_max[it.row()], std::abs(it.value()));
        std::vector<Eigen::Triplet<Complex>> scaled;
        scaled.reserve(sys.triplets.size());
        for (const auto& t : sys.triplets)
            scaled.emplace_back(t.row(), t.col(), t.value() / row_max[t.row()]);
        sys.triplets.swap(scaled);
        for (int i = 0; i < n; ++i) sys.rhs[i] /= row_max[i];
    }
    return sys;
}

// Matrix Market coordinate dump (complex general, 1-based, duplicates
// compressed) plus a matching array-format right-hand side.
inline std::string system_to_matrix_market(const SparseSystem& sys) {
    const auto a = sys.matrix();
    std::string out = "%%MatrixMarket matrix coordinate complex general\n";
    out += std::to_string(sys.n) + " " + std::to_string(sys.n) + " " +
           std::to_string(a.nonZeros()) + "\n";
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(a, k); it; ++it)
            out += std::to_string(it.row() + 1) + " " + std::to_string(it.col() + 1) + " " +
                   format_double(it.value().real()) + " " + format_double(it.value().imag()) +
                   "\n";
    return out;
}

inline std::string rhs_to_matrix_market(const SparseSystem& sys) {
    std::string out = "%%MatrixMarket matrix array complex general\n";
    out += std::to_string(sys.n) + " 1\n";
    for (int i = 0; i < sys.n; ++i)
        out += format_double(sys.rhs[i].real()) + " " + format_double(sys.rhs[i].imag()) + "\n";
    return out;
}

}  // namespace mgfdm
