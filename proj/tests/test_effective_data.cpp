#include <doctest.h>

#include <cmath>
#include <random>

#include "fmr/effective_data.hpp"
#include "fmr/parallel.hpp"

using fmr::FloatingMesh;
using fmr::MeshSample;
using fmr::XiField;

TEST_CASE("xi hand-computed examples") {
    SUBCASE("single sample on the pixel") {
        FloatingMesh m({{2.0, 3.0, 50.0}});
        XiField xi = fmr::compute_xi(m, 6, 6);
        CHECK(xi.at(3, 2) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("single sample at distance one") {
        FloatingMesh m({{2.0, 3.0, 50.0}});
        XiField xi = fmr::compute_xi(m, 6, 6);
        CHECK(xi.at(3, 3) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
        CHECK(xi.at(2, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    }
    SUBCASE("two samples at distances one and two") {
        FloatingMesh m({{1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}});
        XiField xi = fmr::compute_xi(m, 6, 1);
        double expect = std::exp(-1.0) + std::exp(-2.0);  // 0.5032147...
        CHECK(xi.at(0, 0) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(expect == doctest::Approx(0.5032147244).epsilon(1e-7));
    }
    SUBCASE("off-lattice distance") {
        FloatingMesh m({{0.5, 0.5, 0.0}});
        XiField xi = fmr::compute_xi(m, 2, 2);
        double d = std::sqrt(0.5);
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) CHECK(xi.at(r, c) == doctest::Approx(std::exp(-d)).epsilon(1e-9));
    }
}

TEST_CASE("truncated xi matches the exact sum") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-5.0, 69.0);  // include samples off the grid
    std::vector<MeshSample> samples;
    for (int i = 0; i < 1000; ++i) samples.push_back({dist(rng), dist(rng), 0.0});
    FloatingMesh m(samples);

    XiField fast = fmr::compute_xi(m, 64, 64, 25.0);
    XiField exact = fmr::compute_xi_exact(m, 64, 64);
    REQUIRE(fast.values.size() == exact.values.size());
    for (std::size_t i = 0; i < fast.values.size(); ++i) {
        CHECK(std::fabs(fast.values[i] - exact.values[i]) < 1e-5);
        CHECK(fast.values[i] <= exact.values[i] + 1e-15);  // truncation only drops mass
    }
}

TEST_CASE("xi grows with sample density and is nonnegative") {
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> dist(0.0, 31.0);
    std::vector<MeshSample> samples;
    for (int i = 0; i < 100; ++i) samples.push_back({dist(rng), dist(rng), 0.0});
    FloatingMesh sparse(samples);
    for (int i = 0; i < 400; ++i) samples.push_back({dist(rng), dist(rng), 0.0});
    FloatingMesh dense(samples);

    XiField a = fmr::compute_xi(sparse, 32, 32);
    XiField b = fmr::compute_xi(dense, 32, 32);
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        CHECK(a.values[i] >= 0.0);
        CHECK(b.values[i] >= a.values[i] - 1e-12);  // superset of samples
    }
}

TEST_CASE("xi is invariant to the thread count") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> dist(0.0, 47.0);
    std::vector<MeshSample> samples;
    for (int i = 0; i < 600; ++i) samples.push_back({dist(rng), dist(rng), 0.0});
    FloatingMesh m(samples);

    fmr::set_thread_cap(1);
    XiField a = fmr::compute_xi(m, 48, 48);
    fmr::set_thread_cap(5);
    XiField b = fmr::compute_xi(m, 48, 48);
    fmr::set_thread_cap(0);
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}
