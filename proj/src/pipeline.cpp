#include "fmr/pipeline.hpp"

#include <iostream>
#include <stdexcept>

namespace fmr {

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(name) + ": " + e.what());
    }
}

}  // namespace

RefineResult refine(const RefineRequest& req) {
    req.params.validate();
    if (req.params.method != req.method) {
        std::cerr << "warning: strength params were calibrated for " << method_name(req.params.method)
                  << " but the initial estimate uses " << method_name(req.method) << "\n";
    }

    RefineResult res;
    auto rec = stage("reconstruct", [&] { return reconstruct(req.mesh, req.width, req.height, req.method); });
    res.initial = std::move(rec.image);
    res.exterior_mask = std::move(rec.exterior_mask);
    res.xi = stage("effective-data", [&] {
        return compute_xi(req.mesh, req.width, req.height, req.truncation_radius);
    });
    res.strength = stage("strength-map", [&] { return strength_map_from_xi(res.xi, req.params); });
    res.refined = stage("denoise", [&] {
        return denoise_adaptive(res.initial, res.strength, req.denoiser, req.bm3d);
    });
    return res;
}

}  // namespace fmr
