#pragma once

// Deterministic "desk" images for the corpus-based checks. Each image layers
// content at well-separated scales so every stage of the pipeline has
// something to act on:
//   - smooth multi-octave value noise (illumination, paper tone),
//   - a faint fine-grained octave whose detail rides near the denoiser's
//     smallest thresholds,
//   - a sinusoidal halftone screen with a period below the decimation scale,
//     which survives the antialias filter yet cannot be fully recovered from
//     sparse samples at any density,
//   - pixel-level sensor grain,
//   - flat-filled shapes with sharp edges (cards, stickers).

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fmr/image.hpp"

inline fmr::Image desk_image(int size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    fmr::Image img(size, size, 0.0);
    // two strong smooth octaves plus one faint fine octave
    const double amplitudes[] = {44.8, 24.64, 4.0};
    int octave = 0;
    for (int cells : {4, 8, 16}) {
        double amplitude = amplitudes[octave++];
        std::vector<double> lattice((cells + 1) * (cells + 1));
        for (double& v : lattice) v = unit(rng) * 2.0 - 1.0;
        double step = static_cast<double>(size) / cells;
        for (int r = 0; r < size; ++r) {
            double fy = r / step;
            int iy = std::min(cells - 1, static_cast<int>(fy));
            double ty = fy - iy;
            ty = ty * ty * (3 - 2 * ty);
            for (int c = 0; c < size; ++c) {
                double fx = c / step;
                int ix = std::min(cells - 1, static_cast<int>(fx));
                double tx = fx - ix;
                tx = tx * tx * (3 - 2 * tx);
                double v00 = lattice[iy * (cells + 1) + ix];
                double v01 = lattice[iy * (cells + 1) + ix + 1];
                double v10 = lattice[(iy + 1) * (cells + 1) + ix];
                double v11 = lattice[(iy + 1) * (cells + 1) + ix + 1];
                double v = (v00 * (1 - tx) + v01 * tx) * (1 - ty) + (v10 * (1 - tx) + v11 * tx) * ty;
                img.at(r, c) += amplitude * v;
            }
        }
    }

    // halftone screen, random phase per image
    {
        double ph1 = unit(rng) * 6.283, ph2 = unit(rng) * 6.283;
        const double w = 6.283185307179586 / 12.0;
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c)
                img.at(r, c) += 4.0 * std::sin(w * c + ph1) * std::sin(w * r + ph2);
    }

    for (double& v : img.pixels()) v += 128.0;

    // pixel-scale grain; an antialiased downsample suppresses most of it
    std::normal_distribution<double> grain(0.0, 3.0);
    for (double& v : img.pixels()) v += grain(rng);

    // flat-filled shapes with sharp edges
    std::uniform_int_distribution<int> pos(0, size - 1);
    std::uniform_int_distribution<int> span(size / 16, size / 4);
    std::uniform_real_distribution<double> fill(79.5, 176.5);
    for (int s = 0; s < 8; ++s) {
        bool disk = s % 2 == 0;
        int cx = pos(rng), cy = pos(rng), ext = span(rng);
        double value = fill(rng);
        for (int r = std::max(0, cy - ext); r < std::min(size, cy + ext); ++r)
            for (int c = std::max(0, cx - ext); c < std::min(size, cx + ext); ++c) {
                if (disk && (r - cy) * (r - cy) + (c - cx) * (c - cx) > ext * ext / 2) continue;
                img.at(r, c) = value;
            }
    }
    for (double& v : img.pixels()) v = std::clamp(v, 0.0, 255.0);
    return img;
}
