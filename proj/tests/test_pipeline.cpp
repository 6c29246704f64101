#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "fmr/pipeline.hpp"

using fmr::FloatingMesh;
using fmr::InterpolationMethod;
using fmr::MeshSample;
using fmr::RefineRequest;

namespace {

FloatingMesh dense_random_mesh(std::mt19937_64& rng, int n, double extent) {
    std::uniform_real_distribution<double> dist(0.0, extent);
    std::vector<MeshSample> samples;
    samples.push_back({0, 0, 100});
    samples.push_back({extent, 0, 100});
    samples.push_back({0, extent, 100});
    samples.push_back({extent, extent, 100});
    while (static_cast<int>(samples.size()) < n) {
        double x = dist(rng), y = dist(rng);
        bool dup = false;
        for (const auto& s : samples) dup = dup || (s.x == x && s.y == y);
        if (!dup) samples.push_back({x, y, 100 + 50 * std::sin(x * 0.4) * std::cos(y * 0.3)});
    }
    return FloatingMesh(std::move(samples));
}

}  // namespace

TEST_CASE("refine composes the four stages consistently") {
    std::mt19937_64 rng(3);
    RefineRequest req;
    req.mesh = dense_random_mesh(rng, 300, 47.0);
    req.width = 48;
    req.height = 48;
    req.method = InterpolationMethod::LI;
    req.params = fmr::default_params(InterpolationMethod::LI);
    req.denoiser = fmr::DenoiserKind::BLEND;

    fmr::RefineResult res = fmr::refine(req);
    REQUIRE(res.initial.width() == 48);
    REQUIRE(res.refined.width() == 48);
    REQUIRE(res.xi.values.size() == 48 * 48);
    REQUIRE(res.strength.values.size() == 48 * 48);
    REQUIRE(res.exterior_mask.size() == 48 * 48);

    // stage cross-checks: each intermediate equals the module run directly
    auto initial = fmr::reconstruct(req.mesh, 48, 48, req.method);
    auto xi = fmr::compute_xi(req.mesh, 48, 48, req.truncation_radius);
    auto strength = fmr::strength_map_from_xi(xi, req.params);
    auto refined = fmr::denoise_adaptive(initial.image, strength, req.denoiser, req.bm3d);
    for (std::size_t k = 0; k < res.initial.size(); ++k) {
        CHECK(res.initial.data()[k] == initial.image.data()[k]);
        CHECK(res.xi.values[k] == xi.values[k]);
        CHECK(res.strength.values[k] == strength.values[k]);
        CHECK(res.refined.data()[k] == refined.data()[k]);
    }
    for (double v : res.refined.pixels()) {
        CHECK(v >= 0.0);
        CHECK(v <= 255.0);
    }
}

TEST_CASE("refine labels the failing stage") {
    RefineRequest req;
    req.mesh = FloatingMesh({{0, 0, 1}, {1, 1, 2}});  // too few points to triangulate
    req.width = 8;
    req.height = 8;
    req.params = fmr::default_params(req.method);
    try {
        fmr::refine(req);
        FAIL("expected failure");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).rfind("reconstruct:", 0) == 0);
    }
}

TEST_CASE("refine validates strength parameters up front") {
    RefineRequest req;
    req.mesh = FloatingMesh({{0, 0, 1}, {1, 0, 2}, {0, 1, 3}});
    req.width = 4;
    req.height = 4;
    req.params.alpha = -3.0;
    CHECK_THROWS(fmr::refine(req));
}
