#pragma once

#include <array>
#include <vector>

#include "manifold_gfdm/stencil.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

enum class OperatorTag { LB, GradX1, GradX2, GradX3, Conormal };

// A discrete operator evaluated at one node: sum of coeffs[k] * u[cols[k]].
// cols[0] is the center. All rows here annihilate constants because the
// underlying stencil weight rows do.
struct OperatorRow {
    std::vector<int> cols;
    std::vector<double> coeffs;
    OperatorTag tag = OperatorTag::LB;

    template <typename Field>
    auto apply(const Field& u) const {
        auto acc = coeffs[0] * u[cols[0]];
        for (size_t k = 1; k < cols.size(); ++k) acc += coeffs[k] * u[cols[k]];
        return acc;
    }

    double coeff_sum() const {
        double s = 0.0;
        for (double c : coeffs) s += c;
        return s;
    }
};

namespace detail {

inline OperatorRow combine(const StencilWeights& st, const Eigen::Matrix<double, 9, 1>& combo,
                           OperatorTag tag) {
    OperatorRow row;
    row.tag = tag;
    const int cols = static_cast<int>(st.neighbors.size()) + 1;
    row.cols.resize(cols);
    row.coeffs.resize(cols);
    row.cols[0] = st.center;
    for (size_t j = 0; j < st.neighbors.size(); ++j) row.cols[j + 1] = st.neighbors[j];
    const Eigen::RowVectorXd c = combo.transpose() * st.weights;
    for (int k = 0; k < cols; ++k) row.coeffs[k] = c[k];
    return row;
}

}  // namespace detail

// Laplace-Beltrami row in extrinsic form:
//   -hs (n . grad) + sum_i (1 - n_i^2) d_ii - 2 sum_{i<k} n_i n_k d_ik
inline OperatorRow laplace_beltrami_row(const StencilWeights& st, const Vec3& n, double hs) {
    Eigen::Matrix<double, 9, 1> combo;
    combo[kDx1] = -hs * n[0];
    combo[kDx2] = -hs * n[1];
    combo[kDx3] = -hs * n[2];
    combo[kDx1x1] = 1.0 - n[0] * n[0];
    combo[kDx2x2] = 1.0 - n[1] * n[1];
    combo[kDx3x3] = 1.0 - n[2] * n[2];
    combo[kDx1x2] = -2.0 * n[0] * n[1];
    combo[kDx1x3] = -2.0 * n[0] * n[2];
    combo[kDx2x3] = -2.0 * n[1] * n[2];
    return detail::combine(st, combo, OperatorTag::LB);
}

// Tangential gradient rows: (I - n n^T) applied through the first-order
// weights, one row per Euclidean component.
inline std::array<OperatorRow, 3> surface_gradient_rows(const StencilWeights& st,
                                                        const Vec3& n) {
    std::array<OperatorRow, 3> rows;
    const OperatorTag tags[3] = {OperatorTag::GradX1, OperatorTag::GradX2, OperatorTag::GradX3};
    for (int i = 0; i < 3; ++i) {
        Eigen::Matrix<double, 9, 1> combo = Eigen::Matrix<double, 9, 1>::Zero();
        for (int k = 0; k < 3; ++k) combo[k] = (i == k ? 1.0 : 0.0) - n[i] * n[k];
        rows[i] = detail::combine(st, combo, tags[i]);
    }
    return rows;
}

// Directional derivative along a boundary conormal.
inline OperatorRow conormal_derivative_row(const StencilWeights& st, const Vec3& conormal) {
    if (conormal.norm() < 0.5)
        throw MissingConormal("conormal missing or degenerate at node " +
                              std::to_string(st.center));
    Eigen::Matrix<double, 9, 1> combo = Eigen::Matrix<double, 9, 1>::Zero();
    combo[kDx1] = conormal[0];
    combo[kDx2] = conormal[1];
    combo[kDx3] = conormal[2];
    return detail::combine(st, combo, OperatorTag::Conormal);
}

}  // namespace mgfdm
