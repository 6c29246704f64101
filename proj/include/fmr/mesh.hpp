#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmr/image.hpp"

namespace fmr {

struct MeshSample {
    double x = 0.0;  // increases with column index
    double y = 0.0;  // increases with row index
    double value = 0.0;
};

struct MeshBounds {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
};

// Set of samples at real-valued positions. Positions must be unique;
// immutable once built.
class FloatingMesh {
public:
    FloatingMesh() = default;
    explicit FloatingMesh(std::vector<MeshSample> samples);

    const std::vector<MeshSample>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const MeshBounds& bounds() const { return bounds_; }

private:
    std::vector<MeshSample> samples_;
    MeshBounds bounds_;
};

// Rotates every pixel of img about the image center by the given angle.
// Pixel (i,j) starts at position (x=j, y=i).
FloatingMesh mesh_from_rotation(const Image& img, double degrees);

// CSV with header "x,y,value"; 17 significant digits so round-trips are exact.
FloatingMesh read_mesh(const std::string& path);
void write_mesh(const FloatingMesh& mesh, const std::string& path);

// Uniform sample without replacement, seeded partial Fisher-Yates.
// requested count = round(ratio * ref_pixel_count).
FloatingMesh sample_mesh(const FloatingMesh& mesh, double ratio,
                         std::uint64_t ref_pixel_count, std::uint64_t seed);

}  // namespace fmr
