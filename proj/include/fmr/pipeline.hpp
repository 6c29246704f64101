#pragma once

#include "fmr/denoise.hpp"
#include "fmr/effective_data.hpp"
#include "fmr/interpolate.hpp"
#include "fmr/mesh.hpp"
#include "fmr/strength.hpp"

namespace fmr {

struct RefineRequest {
    FloatingMesh mesh;
    int width = 0;
    int height = 0;
    InterpolationMethod method = InterpolationMethod::CI;
    StrengthParams params;
    DenoiserKind denoiser = DenoiserKind::BM3D_HT;
    double truncation_radius = kDefaultTruncationRadius;
    Bm3dConfig bm3d;
};

struct RefineResult {
    Image initial;
    Image refined;
    XiField xi;
    StrengthMap strength;
    std::vector<unsigned char> exterior_mask;
};

// The 4-step reconstruction: interpolate, measure effective data, map it to
// per-pixel strength, denoise. Never looks at any reference image.
RefineResult refine(const RefineRequest& req);

}  // namespace fmr
