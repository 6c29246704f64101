#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fmr/delaunay.hpp"
#include "fmr/image.hpp"
#include "fmr/mesh.hpp"
#include "fmr/point_grid.hpp"

namespace fmr {

enum class InterpolationMethod { NN, LI, CI, NI };

InterpolationMethod method_from_string(const std::string& s);
std::string method_name(InterpolationMethod m);

// Scattered-data evaluator over a Delaunay triangulation. Immutable after
// construction; concurrent evaluation is safe with per-thread hints.
class Interpolator {
public:
    Interpolator(const Triangulation& tri, InterpolationMethod method);

    InterpolationMethod method() const { return method_; }
    const Triangulation& triangulation() const { return tri_; }

    // nullopt = hull exterior (never for NN).
    std::optional<double> evaluate(Vec2 q, int& hint) const;
    std::optional<double> evaluate(Vec2 q) const {
        int hint = 0;
        return evaluate(q, hint);
    }

    // Nearest-vertex value regardless of method (hull-exterior fallback).
    double nearest_value(Vec2 q) const;

    // Sibson weights over natural neighbors of q: (vertex index, weight)
    // pairs, nonnegative, normalized to sum 1. Empty when q is outside or
    // coincident with a vertex (coincidence reports that single vertex).
    std::vector<std::pair<int, double>> sibson_weights(Vec2 q, int& hint) const;

    // Least-squares 1-ring gradient estimates used by the cubic interpolant.
    const std::vector<Vec2>& vertex_gradients() const { return gradients_; }

private:
    double linear_at(int tri, Vec2 q) const;
    double cubic_at(int tri, Vec2 q) const;

    const Triangulation& tri_;
    InterpolationMethod method_;
    std::unique_ptr<PointGrid> grid_;           // nearest-vertex queries
    std::vector<Vec2> gradients_;               // CI
    std::vector<std::array<double, 30>> ct_;    // CI: Bezier net, 3 minis x 10 coefficients
};

struct ReconstructResult {
    Image image;
    std::vector<unsigned char> exterior_mask;  // 1 where NN fallback was used
};

// Evaluates the interpolant at every grid position (x=j, y=i); hull-exterior
// pixels fall back to nearest neighbor and are flagged in the mask.
ReconstructResult reconstruct(const FloatingMesh& mesh, int width, int height,
                              InterpolationMethod method);

}  // namespace fmr
