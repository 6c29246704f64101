#pragma once

#include <vector>

#include "fmr/mesh.hpp"

namespace fmr {

// Per-pixel amount of effective data: sum of e^{-distance} over nearby mesh
// samples. Distances are in reference-grid pixel units.
struct XiField {
    int width = 0;
    int height = 0;
    double truncation_radius = 0.0;
    std::vector<double> values;  // row-major, >= 0

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

inline constexpr double kDefaultTruncationRadius = 25.0;

// Truncated sum; the tail left out is bounded by sample_count * e^{-radius}.
XiField compute_xi(const FloatingMesh& mesh, int width, int height,
                   double truncation_radius = kDefaultTruncationRadius);

// Untruncated O(pixels x samples) reference, for testing.
XiField compute_xi_exact(const FloatingMesh& mesh, int width, int height);

}  // namespace fmr
