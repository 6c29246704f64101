#pragma once

#include "fmr/image.hpp"
#include "fmr/strength.hpp"

namespace fmr {

enum class DenoiserKind { BM3D_HT, BLEND };

DenoiserKind denoiser_from_string(const std::string& s);
std::string denoiser_name(DenoiserKind k);

struct Bm3dConfig {
    int patch_size = 8;
    int step = 4;
    int search_window = 39;  // full side length, centered on the reference patch
    int max_group = 16;      // power of two
    double hard_threshold_lambda = 2.7;

    void validate() const;
};

// Single-stage collaborative hard thresholding. Per reference patch: group
// the most similar patches in the search window, 2D orthonormal DCT per
// patch + orthonormal Haar across the group, zero coefficients below
// lambda * sigma (sigma read from the strength map at the reference patch
// center), inverse, aggregate with weights 1/retained-count.
Image bm3d_hard_threshold(const Image& img, const StrengthMap& strength,
                          const Bm3dConfig& cfg = {});

// Cheap baseline: per-pixel blend toward a 5x5 Gaussian (std 1.2) smoothing,
// w = sigma^2 / (sigma^2 + 100).
Image blend_denoise(const Image& img, const StrengthMap& strength);

Image denoise_adaptive(const Image& img, const StrengthMap& strength, DenoiserKind kind,
                       const Bm3dConfig& cfg = {});

}  // namespace fmr
