#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "manifold_gfdm/io.hpp"
#include "manifold_gfdm/kdtree.hpp"
#include "manifold_gfdm/parallel.hpp"
#include "manifold_gfdm/surface_cloud.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

// Derivative component order used throughout: the weight matrix row k holds
// the weights of the k-th entry of
//   (d/dx1, d/dx2, d/dx3, d2/dx1dx1, d2/dx2dx2, d2/dx3dx3,
//    d2/dx1dx2, d2/dx1dx3, d2/dx2dx3).
enum DerivComponent : int {
    kDx1 = 0,
    kDx2 = 1,
    kDx3 = 2,
    kDx1x1 = 3,
    kDx2x2 = 4,
    kDx3x3 = 5,
    kDx1x2 = 6,
    kDx1x3 = 7,
    kDx2x3 = 8,
};

// Fourth-order spline weight: 1 at the center, 0 from d_max outward.
inline double spline_weight(double d, double d_max) {
    if (d > d_max) return 0.0;
    const double t = d / d_max;
    return 1.0 - 6.0 * t * t + 8.0 * t * t * t - 3.0 * t * t * t * t;
}

// Second-order Taylor monomials of a (scaled) offset.
inline Eigen::Matrix<double, 9, 1> taylor_monomials(const Vec3& d) {
    Eigen::Matrix<double, 9, 1> p;
    p << d[0], d[1], d[2], 0.5 * d[0] * d[0], 0.5 * d[1] * d[1], 0.5 * d[2] * d[2],
        d[0] * d[1], d[0] * d[2], d[1] * d[2];
    return p;
}

// Weighted second-moment matrix of the scaled stencil offsets.
struct MomentMatrix {
    Eigen::Matrix<double, 9, 9> entries = Eigen::Matrix<double, 9, 9>::Zero();
    double scale = 1.0;  // the d_max used to nondimensionalize the offsets
};

// Per-node derivative weights. Column 0 of `weights` belongs to the center
// node, column 1+j to neighbors[j]; every row sums to zero, so constants are
// annihilated by construction.
struct StencilWeights {
    int center = -1;
    std::vector<int> neighbors;
    Eigen::Matrix<double, 9, Eigen::Dynamic> weights;
    int rank = 0;
    double cond_estimate = 0.0;

    // Applies derivative component k to a nodal field.
    template <typename Field>
    auto apply(int k, const Field& u) const {
        auto acc = weights(k, 0) * u[center];
        for (size_t j = 0; j < neighbors.size(); ++j)
            acc += weights(k, static_cast<int>(j) + 1) * u[neighbors[j]];
        return acc;
    }
};

// Nearest-neighbor index restricted to material sides: stencils in D1 draw
// from D1 plus the D1-side interface duplicates, and likewise for D2.
class NeighborIndex {
public:
    explicit NeighborIndex(const SurfaceCloud& cloud) {
        std::vector<int> d1, d2;
        for (int i = 0; i < cloud.size(); ++i)
            (cloud.region[i] == Region::Matrix ? d1 : d2).push_back(i);
        has_d2_ = !d2.empty();
        d1_ = KdTree(cloud.positions, std::move(d1));
        if (has_d2_) d2_ = KdTree(cloud.positions, std::move(d2));
    }

    std::vector<int> knn(const SurfaceCloud& cloud, int center, int m) const {
        const KdTree& tree = (cloud.region[center] == Region::Matrix) ? d1_ : d2_;
        if (tree.size() <= m)
            throw InsufficientNeighbors("node " + std::to_string(center) + " has only " +
                                        std::to_string(tree.size() - 1) +
                                        " same-side neighbors, needs " + std::to_string(m));
        const auto hits = tree.knn(cloud.positions[center], m, center);
        std::vector<int> out(hits.size());
        for (size_t i = 0; i < hits.size(); ++i) out[i] = hits[i].index;
        return out;
    }

private:
    KdTree d1_, d2_;
    bool has_d2_ = false;
};

// One-off m-nearest query with the same-side restriction.
inline std::vector<int> knn_neighbors(const SurfaceCloud& cloud, int center, int m) {
    return NeighborIndex(cloud).knn(cloud, center, m);
}

inline MomentMatrix build_moment_matrix(const std::vector<Vec3>& scaled_offsets,
                                        const std::vector<double>& spline_weights,
                                        double d_max) {
    MomentMatrix mm;
    mm.scale = d_max;
    for (size_t j = 0; j < scaled_offsets.size(); ++j) {
        const auto p = taylor_monomials(scaled_offsets[j]);
        mm.entries += spline_weights[j] * spline_weights[j] * p * p.transpose();
    }
    return mm;
}

namespace detail {
constexpr double kSvdCutoff = 1e-10;  // relative singular-value cutoff
}

// Weighted-least-squares derivative weights from a second-order Taylor
// expansion over the m nearest same-side neighbors. Offsets are scaled by
// d_max before forming the moment matrix; the pseudo-inverse keeps singular
// values above 1e-10 relative, so surface-constrained (rank-deficient)
// stencils still produce consistent weights for tangential operators.
inline StencilWeights build_stencil_from_neighbors(const SurfaceCloud& cloud, int center,
                                                   const std::vector<int>& neighbors) {
    const int m = static_cast<int>(neighbors.size());
    if (m < 3) throw InsufficientNeighbors("stencil needs at least 3 neighbors");

    std::vector<Vec3> offsets(m);
    std::vector<double> dist(m);
    double d_max = 0.0;
    for (int j = 0; j < m; ++j) {
        offsets[j] = cloud.positions[neighbors[j]] - cloud.positions[center];
        dist[j] = offsets[j].norm();
        d_max = std::max(d_max, dist[j]);
    }
    if (!(d_max > 0.0))
        throw SingularStencil("all stencil nodes coincide at node " + std::to_string(center));

    std::vector<Vec3> scaled(m);
    std::vector<double> w(m);
    for (int j = 0; j < m; ++j) {
        scaled[j] = offsets[j] / d_max;
        w[j] = spline_weight(dist[j], d_max);
    }
    const MomentMatrix mm = build_moment_matrix(scaled, w, d_max);

    Eigen::JacobiSVD<Eigen::Matrix<double, 9, 9>> svd(
        mm.entries, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    if (!(sigma[0] > 0.0))
        throw SingularStencil("zero moment matrix at node " + std::to_string(center));

    int rank = 0;
    while (rank < 9 && sigma[rank] > detail::kSvdCutoff * sigma[0]) ++rank;
    if (rank < 3)
        throw SingularStencil("moment matrix rank " + std::to_string(rank) + " < 3 at node " +
                              std::to_string(center));

    Eigen::Matrix<double, 9, 9> pinv = Eigen::Matrix<double, 9, 9>::Zero();
    for (int k = 0; k < rank; ++k)
        pinv += svd.matrixV().col(k) * svd.matrixU().col(k).transpose() / sigma[k];

    StencilWeights st;
    st.center = center;
    st.neighbors = neighbors;
    st.rank = rank;
    st.cond_estimate = sigma[0] / sigma[rank - 1];
    st.weights.resize(9, m + 1);
    Eigen::Matrix<double, 9, 1> unscale;
    unscale << 1, 1, 1, 1, 1, 1, 1, 1, 1;
    unscale.head<3>() /= d_max;
    unscale.tail<6>() /= d_max * d_max;
    Eigen::Matrix<double, 9, 1> center_col = Eigen::Matrix<double, 9, 1>::Zero();
    for (int j = 0; j < m; ++j) {
        const Eigen::Matrix<double, 9, 1> col =
            (w[j] * w[j]) * (pinv * taylor_monomials(scaled[j])).cwiseProduct(unscale);
        st.weights.col(j + 1) = col;
        center_col -= col;
    }
    st.weights.col(0) = center_col;
    return st;
}

inline StencilWeights build_stencil(const SurfaceCloud& cloud, int center, int m,
                                    const NeighborIndex& index) {
    return build_stencil_from_neighbors(cloud, center, index.knn(cloud, center, m));
}

inline StencilWeights build_stencil(const SurfaceCloud& cloud, int center, int m) {
    return build_stencil_from_neighbors(cloud, center, knn_neighbors(cloud, center, m));
}

// All-node stencil construction (parallel; the shared cloud and index are
// read-only).
inline std::vector<StencilWeights> build_all_stencils(const SurfaceCloud& cloud, int m) {
    const NeighborIndex index(cloud);
    std::vector<StencilWeights> out(cloud.size());
    std::vector<std::string> failure(cloud.size());
    parallel_for(cloud.size(), [&](std::int64_t i) {
        try {
            out[i] = build_stencil(cloud, static_cast<int>(i), m, index);
        } catch (const Error& e) {
            failure[i] = e.what();
        }
    });
    for (int i = 0; i < cloud.size(); ++i)
        if (!failure[i].empty()) throw SingularStencil(failure[i]);
    return out;
}

// Debug dump: one row per (center, node, derivative component) weight.
inline std::string stencils_to_csv(const std::vector<StencilWeights>& stencils) {
    std::string out = "center,neighbor,deriv_code,weight\n";
    for (const auto& st : stencils) {
        if (st.center < 0) continue;
        for (int k = 0; k < 9; ++k) {
            out += std::to_string(st.center) + ',' + std::to_string(st.center) + ',' +
                   std::to_string(k) + ',' + format_double(st.weights(k, 0)) + '\n';
            for (size_t j = 0; j < st.neighbors.size(); ++j)
                out += std::to_string(st.center) + ',' + std::to_string(st.neighbors[j]) + ',' +
                       std::to_string(k) + ',' +
                       format_double(st.weights(k, static_cast<int>(j) + 1)) + '\n';
        }
    }
    return out;
}

}  // namespace mgfdm
