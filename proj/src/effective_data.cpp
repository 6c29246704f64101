#include "fmr/effective_data.hpp"

#include <cmath>
#include <stdexcept>

#include "fmr/parallel.hpp"
#include "fmr/point_grid.hpp"

namespace fmr {

XiField compute_xi(const FloatingMesh& mesh, int width, int height, double truncation_radius) {
    if (!(truncation_radius > 0.0))
        throw std::invalid_argument("truncation radius must be positive");
    if (width < 1 || height < 1) throw std::invalid_argument("xi grid dimensions must be >= 1");

    XiField field;
    field.width = width;
    field.height = height;
    field.truncation_radius = truncation_radius;
    field.values.assign(static_cast<std::size_t>(width) * height, 0.0);
    if (mesh.empty()) return field;

    std::vector<Vec2> pts(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i)
        pts[i] = {mesh.samples()[i].x, mesh.samples()[i].y};
    PointGrid grid(pts, 1.0);

    double r2 = truncation_radius * truncation_radius;
    parallel_for(height, [&](std::size_t row0, std::size_t row1) {
        for (std::size_t r = row0; r < row1; ++r) {
            for (int c = 0; c < width; ++c) {
                Vec2 q{static_cast<double>(c), static_cast<double>(r)};
                double acc = 0.0;
                grid.for_each_in_radius(q, truncation_radius, [&](int idx) {
                    double dx = pts[idx].x - q.x, dy = pts[idx].y - q.y;
                    double d2 = dx * dx + dy * dy;
                    if (d2 <= r2) acc += std::exp(-std::sqrt(d2));
                });
                field.values[r * width + c] = acc;
            }
        }
    });
    return field;
}

XiField compute_xi_exact(const FloatingMesh& mesh, int width, int height) {
    if (width < 1 || height < 1) throw std::invalid_argument("xi grid dimensions must be >= 1");
    XiField field;
    field.width = width;
    field.height = height;
    field.truncation_radius = 0.0;  // untruncated
    field.values.assign(static_cast<std::size_t>(width) * height, 0.0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            double acc = 0.0;
            for (const auto& s : mesh.samples()) {
                double dx = s.x - c, dy = s.y - r;
                acc += std::exp(-std::sqrt(dx * dx + dy * dy));
            }
            field.values[static_cast<std::size_t>(r) * width + c] = acc;
        }
    }
    return field;
}

}  // namespace fmr
