#pragma once

#include <array>
#include <vector>

#include "fmr/mesh.hpp"

namespace fmr {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Triangle vertices are counter-clockwise; neighbor[k] is the triangle across
// the edge opposite vertex[k], or -1 on the hull boundary.
struct Triangle {
    std::array<int, 3> v{-1, -1, -1};
    std::array<int, 3> n{-1, -1, -1};
};

inline constexpr int kOutside = -1;

// Delaunay triangulation of the mesh sample positions. Immutable once built;
// concurrent locate() is safe as long as each thread keeps its own hint.
class Triangulation {
public:
    const std::vector<Vec2>& positions() const { return positions_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<int>& hull() const { return hull_; }  // CCW vertex indices

    std::size_t vertex_count() const { return positions_.size(); }

    // Containing triangle index (boundary-inclusive) or kOutside. hint is
    // updated to the result when found; pass the previous result for
    // near-O(1) raster-order queries.
    int locate(Vec2 q, int& hint) const;
    int locate(Vec2 q) const {
        int hint = 0;
        return locate(q, hint);
    }

    Vec2 circumcenter(int tri) const;
    double triangle_area(int tri) const;

    friend Triangulation build_delaunay(const FloatingMesh& mesh);

private:
    std::vector<Vec2> positions_;
    std::vector<double> values_;
    std::vector<Triangle> triangles_;
    std::vector<int> hull_;
};

// Incremental insertion in input order with robust predicates.
// Throws on fewer than 3 samples or an all-collinear point set.
Triangulation build_delaunay(const FloatingMesh& mesh);

}  // namespace fmr
