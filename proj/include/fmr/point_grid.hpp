#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fmr/delaunay.hpp"

namespace fmr {

// Uniform bucket grid over a point set for radius and nearest queries.
class PointGrid {
public:
    PointGrid(const std::vector<Vec2>& points, double cell_size);

    // Visits indices of all points within `radius` of q (and possibly a few
    // beyond; callers re-check distances).
    template <typename Fn>
    void for_each_in_radius(Vec2 q, double radius, Fn&& fn) const {
        int c0 = cell_x(q.x - radius), c1 = cell_x(q.x + radius);
        int r0 = cell_y(q.y - radius), r1 = cell_y(q.y + radius);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                for (int idx : bucket(r, c)) fn(idx);
    }

    // Index of the closest point, ties broken by lowest index.
    int nearest(Vec2 q) const;

private:
    int cell_x(double x) const;
    int cell_y(double y) const;
    const std::vector<int>& bucket(int row, int col) const;

    const std::vector<Vec2>& points_;
    double cell_ = 1.0;
    double min_x_ = 0.0, min_y_ = 0.0;
    int cols_ = 1, rows_ = 1;
    std::vector<std::vector<int>> buckets_;
    static const std::vector<int> kEmpty;
};

}  // namespace fmr
