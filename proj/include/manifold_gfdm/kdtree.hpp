#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "manifold_gfdm/types.hpp"

namespace mgfdm {

// Static 3-d tree over a subset of a point list. Built once, queried many
// times. k-nearest queries order candidates by (squared distance, node index)
// so ties are broken deterministically, matching an exhaustive scan.
class KdTree {
public:
    KdTree() = default;

    KdTree(const std::vector<Vec3>& points, std::vector<int> subset)
        : points_(&points), idx_(std::move(subset)) {
        nodes_.resize(idx_.size());
        if (!idx_.empty()) root_ = build(0, static_cast<int>(idx_.size()));
    }

    explicit KdTree(const std::vector<Vec3>& points)
        : KdTree(points, all_indices(points.size())) {}

    int size() const { return static_cast<int>(idx_.size()); }

    struct Hit {
        double dist2;
        int index;  // index into the original point list
        bool operator<(const Hit& o) const {
            return dist2 != o.dist2 ? dist2 < o.dist2 : index < o.index;
        }
    };

    // k nearest to q, excluding `exclude` (pass -1 to keep everything).
    // Result sorted ascending by (dist2, index).
    std::vector<Hit> knn(const Vec3& q, int k, int exclude = -1) const {
        if (k <= 0) return {};
        Heap heap;
        heap.reserve(static_cast<size_t>(k) + 1);
        if (root_ >= 0) search(root_, q, k, exclude, heap);
        std::sort(heap.begin(), heap.end());
        return heap;
    }

private:
    struct Node {
        Vec3 point;
        int index = -1;  // original index
        int left = -1, right = -1;
        int axis = 0;
    };
    using Heap = std::vector<Hit>;  // max-heap on (dist2, index)

    static std::vector<int> all_indices(size_t n) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return v;
    }

    int build(int lo, int hi) {
        if (lo >= hi) return -1;
        // split on the widest axis of this range
        Vec3 mn = Vec3::Constant(std::numeric_limits<double>::max());
        Vec3 mx = Vec3::Constant(std::numeric_limits<double>::lowest());
        for (int i = lo; i < hi; ++i) {
            const Vec3& p = (*points_)[idx_[i]];
            mn = mn.cwiseMin(p);
            mx = mx.cwiseMax(p);
        }
        int axis = 0;
        (mx - mn).maxCoeff(&axis);

        const int mid = lo + (hi - lo) / 2;
        std::nth_element(idx_.begin() + lo, idx_.begin() + mid, idx_.begin() + hi,
                         [&](int a, int b) {
                             const double pa = (*points_)[a][axis], pb = (*points_)[b][axis];
                             return pa != pb ? pa < pb : a < b;
                         });
        const int self = next_node_++;
        nodes_[self].point = (*points_)[idx_[mid]];
        nodes_[self].index = idx_[mid];
        nodes_[self].axis = axis;
        nodes_[self].left = build(lo, mid);
        nodes_[self].right = build(mid + 1, hi);
        return self;
    }

    static bool heap_less(const Hit& a, const Hit& b) { return a < b; }

    void search(int node, const Vec3& q, int k, int exclude, Heap& heap) const {
        const Node& nd = nodes_[node];
        if (nd.index != exclude) {
            const double d2 = (nd.point - q).squaredNorm();
            const Hit hit{d2, nd.index};
            if (static_cast<int>(heap.size()) < k) {
                heap.push_back(hit);
                std::push_heap(heap.begin(), heap.end(), heap_less);
            } else if (hit < heap.front()) {
                std::pop_heap(heap.begin(), heap.end(), heap_less);
                heap.back() = hit;
                std::push_heap(heap.begin(), heap.end(), heap_less);
            }
        }
        const double delta = q[nd.axis] - nd.point[nd.axis];
        const int near = delta <= 0 ? nd.left : nd.right;
        const int far = delta <= 0 ? nd.right : nd.left;
        if (near >= 0) search(near, q, k, exclude, heap);
        if (far >= 0) {
            const bool full = static_cast<int>(heap.size()) >= k;
            if (!full || delta * delta <= heap.front().dist2) search(far, q, k, exclude, heap);
        }
    }

    const std::vector<Vec3>* points_ = nullptr;
    std::vector<int> idx_;
    std::vector<Node> nodes_;
    int next_node_ = 0;
    int root_ = -1;
};

}  // namespace mgfdm
