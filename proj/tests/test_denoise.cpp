#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fmr/denoise.hpp"
#include "fmr/parallel.hpp"

using fmr::Bm3dConfig;
using fmr::DenoiserKind;
using fmr::Image;

namespace {

Image random_image(std::mt19937_64& rng, int w, int h, double lo = 0.0, double hi = 255.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Image img(w, h);
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = dist(rng);
    return img;
}

// independent orthonormal DCT-II, direct O(n^4) evaluation
std::vector<double> dct2_oracle(const std::vector<double>& in, int n, bool inverse) {
    std::vector<double> out(in.size(), 0.0);
    auto basis = [&](int k, int i) {
        return std::sqrt((k == 0 ? 1.0 : 2.0) / n) *
               std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    };
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            double acc = 0.0;
            for (int y = 0; y < n; ++y)
                for (int x = 0; x < n; ++x)
                    acc += in[y * n + x] * (inverse ? basis(y, u) * basis(x, v)
                                                    : basis(u, y) * basis(v, x));
            out[u * n + v] = acc;
        }
    return out;
}

}  // namespace

TEST_CASE("bm3d config validation") {
    CHECK_NOTHROW(Bm3dConfig{}.validate());
    CHECK_THROWS(Bm3dConfig{8, 4, 8, 16, 2.7}.validate());   // window <= patch
    CHECK_THROWS(Bm3dConfig{8, 4, 39, 12, 2.7}.validate());  // group not a power of two
    CHECK_THROWS(Bm3dConfig{8, 0, 39, 16, 2.7}.validate());
}

TEST_CASE("single-patch bm3d equals a direct DCT hard threshold") {
    // 8x8 image, patch 8, search window 9 -> exactly one group of one patch;
    // the whole pipeline degenerates to threshold-in-DCT-domain.
    std::mt19937_64 rng(17);
    Image img = random_image(rng, 8, 8);
    double sigma2 = 400.0;
    Bm3dConfig cfg{8, 8, 9, 16, 2.7};

    fmr::StrengthMap strength = fmr::uniform_strength(8, 8, sigma2);
    Image got = fmr::bm3d_hard_threshold(img, strength, cfg);

    std::vector<double> coef = dct2_oracle(img.pixels(), 8, false);
    double thr = 2.7 * std::sqrt(sigma2);
    for (int k = 1; k < 64; ++k)  // DC preserved
        if (std::fabs(coef[k]) < thr) coef[k] = 0.0;
    std::vector<double> expect = dct2_oracle(coef, 8, true);

    for (int k = 0; k < 64; ++k)
        CHECK(got.data()[k] == doctest::Approx(expect[k]).epsilon(1e-9));
}

TEST_CASE("bm3d with zero strength is the identity") {
    std::mt19937_64 rng(23);
    Image img = random_image(rng, 32, 24);
    Image out = fmr::bm3d_hard_threshold(img, fmr::uniform_strength(32, 24, 0.0), {});
    for (std::size_t k = 0; k < img.size(); ++k)
        CHECK(out.data()[k] == doctest::Approx(img.data()[k]).epsilon(1e-9));
}

TEST_CASE("bm3d preserves constant images") {
    Image img(40, 30, 77.0);
    Image out = fmr::bm3d_hard_threshold(img, fmr::uniform_strength(40, 30, 625.0), {});
    for (std::size_t k = 0; k < img.size(); ++k)
        CHECK(out.data()[k] == doctest::Approx(77.0).epsilon(1e-9));
}

TEST_CASE("bm3d denoises piecewise-constant images") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> noise(0.0, 25.0);
    Image clean(64, 64);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c) clean.at(r, c) = (c < 32) == (r < 32) ? 64.0 : 192.0;
    Image noisy = clean;
    for (std::size_t k = 0; k < noisy.size(); ++k) noisy.data()[k] += noise(rng);

    Image den = fmr::bm3d_hard_threshold(noisy, fmr::uniform_strength(64, 64, 625.0), {});
    double before = fmr::psnr(clean, noisy);
    double after = fmr::psnr(clean, den);
    CHECK(after - before >= 5.0);
}

TEST_CASE("bm3d is invariant to the thread count") {
    std::mt19937_64 rng(37);
    Image img = random_image(rng, 50, 41);
    fmr::set_thread_cap(1);
    Image a = fmr::bm3d_hard_threshold(img, fmr::uniform_strength(50, 41, 100.0), {});
    fmr::set_thread_cap(7);
    Image b = fmr::bm3d_hard_threshold(img, fmr::uniform_strength(50, 41, 100.0), {});
    fmr::set_thread_cap(0);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.data()[k] == b.data()[k]);  // bitwise
}

TEST_CASE("blend weight law") {
    std::mt19937_64 rng(41);
    Image img = random_image(rng, 20, 20);

    // w(s2) = s2/(s2+100): solve for the smoothed image from one output and
    // predict another strength exactly
    Image half = fmr::blend_denoise(img, fmr::uniform_strength(20, 20, 100.0));   // w = 1/2
    Image threeq = fmr::blend_denoise(img, fmr::uniform_strength(20, 20, 300.0)); // w = 3/4
    for (std::size_t k = 0; k < img.size(); ++k) {
        double predicted = img.data()[k] + 1.5 * (half.data()[k] - img.data()[k]);
        CHECK(threeq.data()[k] == doctest::Approx(predicted).epsilon(1e-12));
    }

    Image zero = fmr::blend_denoise(img, fmr::uniform_strength(20, 20, 0.0));
    for (std::size_t k = 0; k < img.size(); ++k) CHECK(zero.data()[k] == img.data()[k]);

    Image flat(20, 20, 99.0);
    Image out = fmr::blend_denoise(flat, fmr::uniform_strength(20, 20, 500.0));
    for (std::size_t k = 0; k < out.size(); ++k)
        CHECK(out.data()[k] == doctest::Approx(99.0).epsilon(1e-12));
}

TEST_CASE("adaptive denoise dispatch and clamping") {
    std::mt19937_64 rng(47);
    Image img = random_image(rng, 24, 24, -60.0, 320.0);  // deliberately out of gamut

    fmr::StrengthMap zero = fmr::uniform_strength(24, 24, 0.0);
    Image same = fmr::denoise_adaptive(img, zero, DenoiserKind::BM3D_HT, {});
    for (std::size_t k = 0; k < img.size(); ++k)
        CHECK(same.data()[k] == std::clamp(img.data()[k], 0.0, 255.0));

    for (auto kind : {DenoiserKind::BM3D_HT, DenoiserKind::BLEND}) {
        Image out = fmr::denoise_adaptive(img, fmr::uniform_strength(24, 24, 50.0), kind, {});
        for (std::size_t k = 0; k < out.size(); ++k) {
            CHECK(out.data()[k] >= 0.0);
            CHECK(out.data()[k] <= 255.0);
        }
    }

    fmr::StrengthMap wrong = fmr::uniform_strength(10, 10, 1.0);
    CHECK_THROWS(fmr::denoise_adaptive(img, wrong, DenoiserKind::BLEND, {}));
}

TEST_CASE("denoiser names") {
    CHECK(fmr::denoiser_from_string("bm3d") == DenoiserKind::BM3D_HT);
    CHECK(fmr::denoiser_from_string("blend") == DenoiserKind::BLEND);
    CHECK_THROWS(fmr::denoiser_from_string("median"));
    CHECK(fmr::denoiser_name(DenoiserKind::BM3D_HT) == "bm3d");
}
