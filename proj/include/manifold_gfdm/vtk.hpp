#pragma once

#include <string>

#include "manifold_gfdm/benchmarks.hpp"
#include "manifold_gfdm/io.hpp"

namespace mgfdm {

// Legacy ASCII VTK polydata point cloud with re_u / im_u / abs_u point data,
// nodes written in cloud order.
inline std::string field_to_vtk(const CaseResult& r, const std::string& title = "field") {
    const int n = r.cloud.size();
    std::string out;
    out += "# vtk DataFile Version 3.0\n";
    out += title + "\n";
    out += "ASCII\n";
    out += "DATASET POLYDATA\n";
    out += "POINTS " + std::to_string(n) + " double\n";
    for (int i = 0; i < n; ++i) {
        const Vec3& p = r.cloud.positions[i];
        out += format_double(p[0]) + ' ' + format_double(p[1]) + ' ' + format_double(p[2]) +
               '\n';
    }
    out += "VERTICES " + std::to_string(n) + " " + std::to_string(2 * n) + "\n";
    for (int i = 0; i < n; ++i) out += "1 " + std::to_string(i) + '\n';
    out += "POINT_DATA " + std::to_string(n) + "\n";
    const char* names[3] = {"re_u", "im_u", "abs_u"};
    for (int a = 0; a < 3; ++a) {
        out += std::string("SCALARS ") + names[a] + " double 1\n";
        out += "LOOKUP_TABLE default\n";
        for (int i = 0; i < n; ++i) {
            const Complex u = r.field.values[i];
            const double v = (a == 0) ? u.real() : (a == 1) ? u.imag() : std::abs(u);
            out += format_double(v) + '\n';
        }
    }
    return out;
}

}  // namespace mgfdm
