#pragma once

#include <cmath>
#include <iostream>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "manifold_gfdm/assembly.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

// Nodal complex solution, index-aligned with the cloud.
struct ComplexField {
    Eigen::VectorXcd values;

    int size() const { return static_cast<int>(values.size()); }
    Complex operator[](int i) const { return values[i]; }
    double amplitude(int i) const { return std::abs(values[i]); }
    double phase(int i) const { return std::arg(values[i]); }
};

struct SolveInfo {
    double residual = 0.0;        // ||A u - b||_inf / ||b||_inf (absolute when b = 0)
    double backward_error = 0.0;  // componentwise: max_i |r_i| / (|A||u| + |b|)_i
};

// Sparse direct solve: row max-abs scaling, then LU with threshold pivoting
// and a fill-reducing column ordering. The scaling is solver-internal (mixed
// materials put 1e15 and O(1) rows in the same matrix, which defeats
// threshold pivoting on the raw system); residuals are reported against the
// unscaled system. The warning keys off the componentwise backward error,
// which stays meaningful across disparate row scales. A broken factorization
// is fatal.
inline ComplexField solve(const SparseSystem& sys, SolveInfo* info = nullptr) {
    const Eigen::SparseMatrix<Complex> a = sys.matrix();

    Eigen::VectorXd row_scale = Eigen::VectorXd::Zero(sys.n);
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(a, k); it; ++it)
            row_scale[it.row()] = std::max(row_scale[it.row()], std::abs(it.value()));
    for (int i = 0; i < sys.n; ++i)
        if (row_scale[i] == 0.0)
            throw SingularMatrix("row " + std::to_string(i) + " is entirely zero");

    Eigen::SparseMatrix<Complex> scaled = a;
    for (int k = 0; k < scaled.outerSize(); ++k)
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(scaled, k); it; ++it)
            it.valueRef() /= row_scale[it.row()];
    const Eigen::VectorXcd scaled_rhs = sys.rhs.cwiseQuotient(row_scale.cast<Complex>());

    Eigen::SparseLU<Eigen::SparseMatrix<Complex>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(scaled);
    lu.factorize(scaled);
    if (lu.info() != Eigen::Success)
        throw SingularMatrix("sparse LU factorization failed: " + lu.lastErrorMessage());
    ComplexField field;
    field.values = lu.solve(scaled_rhs);
    if (lu.info() != Eigen::Success) throw SingularMatrix("sparse LU solve failed");
    if (!field.values.allFinite()) throw SingularMatrix("solution contains non-finite entries");

    const Eigen::VectorXcd r = a * field.values - sys.rhs;
    const double bnorm = sys.rhs.lpNorm<Eigen::Infinity>();
    double residual = r.lpNorm<Eigen::Infinity>();
    if (bnorm > 0.0) residual /= bnorm;

    Eigen::VectorXd denom = sys.rhs.cwiseAbs();
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(a, k); it; ++it)
            denom[it.row()] += std::abs(it.value()) * std::abs(field.values[it.col()]);
    double backward = 0.0;
    for (int i = 0; i < sys.n; ++i)
        if (denom[i] > 0.0) backward = std::max(backward, std::abs(r[i]) / denom[i]);
    if (backward > 1e-8)
        std::cerr << "warning: solve backward error " << backward << " exceeds 1e-8 (residual "
                  << residual << ")\n";
    if (info) {
        info->residual = residual;
        info->backward_error = backward;
    }
    return field;
}

}  // namespace mgfdm
