#include "fmr/point_grid.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fmr {

const std::vector<int> PointGrid::kEmpty;

PointGrid::PointGrid(const std::vector<Vec2>& points, double cell_size)
    : points_(points), cell_(cell_size) {
    if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
    if (points.empty()) {
        buckets_.resize(1);
        return;
    }
    double max_x = points[0].x, max_y = points[0].y;
    min_x_ = points[0].x;
    min_y_ = points[0].y;
    for (const auto& p : points) {
        min_x_ = std::min(min_x_, p.x);
        min_y_ = std::min(min_y_, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    cols_ = std::max(1, static_cast<int>(std::floor((max_x - min_x_) / cell_)) + 1);
    rows_ = std::max(1, static_cast<int>(std::floor((max_y - min_y_) / cell_)) + 1);
    buckets_.resize(static_cast<std::size_t>(cols_) * rows_);
    for (std::size_t i = 0; i < points.size(); ++i) {
        int c = std::clamp(static_cast<int>(std::floor((points[i].x - min_x_) / cell_)), 0, cols_ - 1);
        int r = std::clamp(static_cast<int>(std::floor((points[i].y - min_y_) / cell_)), 0, rows_ - 1);
        buckets_[static_cast<std::size_t>(r) * cols_ + c].push_back(static_cast<int>(i));
    }
}

int PointGrid::cell_x(double x) const {
    return std::clamp(static_cast<int>(std::floor((x - min_x_) / cell_)), 0, cols_ - 1);
}

int PointGrid::cell_y(double y) const {
    return std::clamp(static_cast<int>(std::floor((y - min_y_) / cell_)), 0, rows_ - 1);
}

const std::vector<int>& PointGrid::bucket(int row, int col) const {
    if (row < 0 || row >= rows_ || col < 0 || col >= cols_) return kEmpty;
    return buckets_[static_cast<std::size_t>(row) * cols_ + col];
}

int PointGrid::nearest(Vec2 q) const {
    if (points_.empty()) return -1;
    int qc = cell_x(q.x), qr = cell_y(q.y);
    double best_d2 = std::numeric_limits<double>::infinity();
    int best = -1;
    auto consider = [&](int idx) {
        double dx = points_[idx].x - q.x, dy = points_[idx].y - q.y;
        double d2 = dx * dx + dy * dy;
        if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
            best_d2 = d2;
            best = idx;
        }
    };
    int max_ring = std::max(cols_, rows_);
    for (int ring = 0; ring <= max_ring; ++ring) {
        // stop once everything beyond the previous ring's box is farther than
        // the best candidate (q may sit outside the grid, so measure for real)
        if (best >= 0 && ring > 0) {
            double rx0 = min_x_ + (qc - (ring - 1)) * cell_;
            double rx1 = min_x_ + (qc + ring) * cell_;
            double ry0 = min_y_ + (qr - (ring - 1)) * cell_;
            double ry1 = min_y_ + (qr + ring) * cell_;
            double lb = std::min(std::min(q.x - rx0, rx1 - q.x), std::min(q.y - ry0, ry1 - q.y));
            if (lb > 0 && lb * lb > best_d2) break;
        }
        if (ring == 0) {
            for (int idx : bucket(qr, qc)) consider(idx);
            continue;
        }
        for (int c = qc - ring; c <= qc + ring; ++c) {
            for (int idx : bucket(qr - ring, c)) consider(idx);
            for (int idx : bucket(qr + ring, c)) consider(idx);
        }
        for (int r = qr - ring + 1; r <= qr + ring - 1; ++r) {
            for (int idx : bucket(r, qc - ring)) consider(idx);
            for (int idx : bucket(r, qc + ring)) consider(idx);
        }
    }
    return best;
}

}  // namespace fmr
