#pragma once

#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "manifold_gfdm/io.hpp"
#include "manifold_gfdm/types.hpp"

namespace mgfdm {

enum class Region : int { Matrix = 1, Inclusion = 2 };

enum class Boundary : int {
    Interior = 0,
    GammaI = 1,    // incident excitation, u = C
    GammaA = 2,    // absorbing
    GammaN = 3,    // zero Neumann
    GammaP1 = 4,   // periodic, source side
    GammaP2 = 5,   // periodic, translated side (x = x_P1 + a)
    Gamma0D1 = 6,  // interface duplicate, matrix side (also hole rims)
    Gamma0D2 = 7,  // interface duplicate, inclusion side
};

// Tagged node cloud on a surface. Interface duplicates are separate entries
// with byte-identical coordinates; `conormals` entries are meaningful (unit,
// tangent, outward from the node's own region) only where `boundary` is not
// Interior. `edge` keeps the sampling edge id (1..4, 0 elsewhere) so a case
// can map geometric edges onto physical boundary tags after sampling.
struct SurfaceCloud {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<double> hs_values;
    std::vector<Region> region;
    std::vector<Boundary> boundary;
    std::vector<Vec3> conormals;
    std::vector<int> edge;
    std::vector<std::pair<int, int>> periodic_pairs;   // (GammaP1 node, GammaP2 node)
    std::vector<std::pair<int, int>> interface_pairs;  // (D1-side node, D2-side node)
    double spacing = 0.0;                              // nominal node spacing

    int size() const { return static_cast<int>(positions.size()); }

    void append(const Vec3& pos, const Vec3& normal, double hs,
                Region reg = Region::Matrix, Boundary b = Boundary::Interior,
                const Vec3& conormal = Vec3::Zero(), int edge_id = 0) {
        positions.push_back(pos);
        normals.push_back(normal);
        hs_values.push_back(hs);
        region.push_back(reg);
        boundary.push_back(b);
        conormals.push_back(conormal);
        edge.push_back(edge_id);
    }

    std::vector<int> nodes_with(Boundary b) const {
        std::vector<int> out;
        for (int i = 0; i < size(); ++i)
            if (boundary[i] == b) out.push_back(i);
        return out;
    }

    std::vector<int> nodes_on_edge(int edge_id) const {
        std::vector<int> out;
        for (int i = 0; i < size(); ++i)
            if (edge[i] == edge_id) out.push_back(i);
        return out;
    }

    // Map sampling edges 1..4 onto physical tags; conormals stay as sampled.
    void tag_edges(Boundary e1, Boundary e2, Boundary e3, Boundary e4) {
        const Boundary tags[4] = {e1, e2, e3, e4};
        for (int i = 0; i < size(); ++i)
            if (edge[i] >= 1 && edge[i] <= 4) boundary[i] = tags[edge[i] - 1];
    }
};

inline std::string cloud_to_csv(const SurfaceCloud& c) {
    std::string out = "x1,x2,x3,n1,n2,n3,hs,region,boundary\n";
    for (int i = 0; i < c.size(); ++i) {
        const Vec3& p = c.positions[i];
        const Vec3& n = c.normals[i];
        out += format_double(p[0]) + ',' + format_double(p[1]) + ',' + format_double(p[2]) +
               ',' + format_double(n[0]) + ',' + format_double(n[1]) + ',' +
               format_double(n[2]) + ',' + format_double(c.hs_values[i]) + ',' +
               std::to_string(static_cast<int>(c.region[i])) + ',' +
               std::to_string(static_cast<int>(c.boundary[i])) + '\n';
    }
    return out;
}

inline SurfaceCloud cloud_from_csv(const std::string& text) {
    SurfaceCloud c;
    size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        const std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        if (header) {
            if (line != "x1,x2,x3,n1,n2,n3,hs,region,boundary")
                throw IoError("unexpected cloud CSV header: " + line);
            header = false;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 9) throw IoError("bad cloud CSV row: " + line);
        c.append(Vec3(std::strtod(f[0].c_str(), nullptr), std::strtod(f[1].c_str(), nullptr),
                      std::strtod(f[2].c_str(), nullptr)),
                 Vec3(std::strtod(f[3].c_str(), nullptr), std::strtod(f[4].c_str(), nullptr),
                      std::strtod(f[5].c_str(), nullptr)),
                 std::strtod(f[6].c_str(), nullptr), static_cast<Region>(std::atoi(f[7].c_str())),
                 static_cast<Boundary>(std::atoi(f[8].c_str())));
    }
    return c;
}

}  // namespace mgfdm
