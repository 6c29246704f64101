#include <doctest.h>

#include <cmath>
#include <random>

#include "fmr/strength.hpp"

using fmr::InterpolationMethod;
using fmr::StrengthParams;

TEST_CASE("sigma_opt formula against a direct evaluation") {
    // independent form of the law: alpha * (1 - 1/(1 + e^{-(xi/gamma + beta)}))
    StrengthParams p{105.54, 0.08, 0.97, InterpolationMethod::CI};
    for (double xi : {0.0, 0.3, 1.0, 2.5, 7.0, 40.0}) {
        double t = xi / p.gamma + p.beta;
        double expect = p.alpha * (1.0 - 1.0 / (1.0 + std::exp(-t)));
        CHECK(fmr::sigma_opt(xi, p) == doctest::Approx(expect).epsilon(1e-12));
    }

    // spot value at xi = 0: 105.54 * (1 - 1/(1+e^-0.08)) = 50.659...
    CHECK(fmr::sigma_opt(0.0, p) == doctest::Approx(50.659).epsilon(0.0001));

    // stays finite and correct deep in the tail where e^{xi/gamma} overflows
    double tail = fmr::sigma_opt(1e6, p);
    CHECK(std::isfinite(tail));
    CHECK(tail >= 0.0);
    CHECK(tail < 1e-12);
}

TEST_CASE("sigma_opt is decreasing in xi and bounded by alpha") {
    for (auto m : {InterpolationMethod::NN, InterpolationMethod::LI, InterpolationMethod::CI,
                   InterpolationMethod::NI}) {
        StrengthParams p = fmr::default_params(m);
        double prev = fmr::sigma_opt(0.0, p);
        CHECK(prev < p.alpha);
        for (double xi = 0.25; xi < 30.0; xi += 0.25) {
            double cur = fmr::sigma_opt(xi, p);
            CHECK(cur >= 0.0);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}

TEST_CASE("calibrated default parameters") {
    auto li = fmr::default_params(InterpolationMethod::LI);
    CHECK(li.alpha == doctest::Approx(73.69));
    CHECK(li.beta == doctest::Approx(-0.71));
    CHECK(li.gamma == doctest::Approx(0.68));
    auto ci = fmr::default_params(InterpolationMethod::CI);
    CHECK(ci.alpha == doctest::Approx(105.54));
    CHECK(ci.beta == doctest::Approx(0.08));
    CHECK(ci.gamma == doctest::Approx(0.97));
    auto ni = fmr::default_params(InterpolationMethod::NI);
    CHECK(ni.alpha == doctest::Approx(44.14));
    CHECK(ni.beta == doctest::Approx(-3.64));
    CHECK(ni.gamma == doctest::Approx(0.27));
    auto nn = fmr::default_params(InterpolationMethod::NN);
    CHECK(nn.alpha == doctest::Approx(84.38));
    CHECK(nn.beta == doctest::Approx(0.40));
    CHECK(nn.gamma == doctest::Approx(4.17));
}

TEST_CASE("params validation") {
    CHECK_THROWS(StrengthParams{-1.0, 0.0, 1.0, InterpolationMethod::CI}.validate());
    CHECK_THROWS(StrengthParams{1.0, 0.0, 0.0, InterpolationMethod::CI}.validate());
    CHECK_THROWS(StrengthParams{1.0, 0.0, -2.0, InterpolationMethod::CI}.validate());
    CHECK_NOTHROW(StrengthParams{1.0, -5.0, 0.5, InterpolationMethod::CI}.validate());
}

TEST_CASE("strength map applies the law per pixel") {
    fmr::XiField xi;
    xi.width = 4;
    xi.height = 3;
    xi.truncation_radius = 25.0;
    for (int i = 0; i < 12; ++i) xi.values.push_back(i * 0.5);
    StrengthParams p = fmr::default_params(InterpolationMethod::NI);
    fmr::StrengthMap map = fmr::strength_map_from_xi(xi, p);
    REQUIRE(map.values.size() == 12);
    for (int i = 0; i < 12; ++i) CHECK(map.values[i] == fmr::sigma_opt(xi.values[i], p));

    fmr::StrengthMap u = fmr::uniform_strength(5, 2, 33.0);
    CHECK(u.values.size() == 10);
    for (double v : u.values) CHECK(v == 33.0);
    CHECK_THROWS(fmr::uniform_strength(5, 2, -1.0));
}

TEST_CASE("per-pixel gain definition") {
    fmr::Image ref(2, 2), initial(2, 2), denoised(2, 2);
    ref.at(0, 0) = 10;
    initial.at(0, 0) = 14;   // err^2 16
    denoised.at(0, 0) = 11;  // err^2 1 -> gain 15
    auto g = fmr::gain(ref, initial, denoised);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == doctest::Approx(15.0));
    CHECK(g[1] == 0.0);
}

TEST_CASE("sigmoid fit recovers synthetic parameters") {
    StrengthParams truth{80.0, -2.0, 0.8, InterpolationMethod::CI};
    std::vector<double> xi, s2, w;
    for (double x = 0.0; x <= 8.0; x += 0.1) {
        xi.push_back(x);
        s2.push_back(fmr::sigma_opt(x, truth));
        w.push_back(1.0);
    }

    SUBCASE("noise free") {
        auto fit = fmr::fit_sigmoid_path(xi, s2, w);
        CHECK(std::fabs(fit.params.alpha - truth.alpha) / truth.alpha < 1e-6);
        CHECK(std::fabs(fit.params.beta - truth.beta) / std::fabs(truth.beta) < 1e-6);
        CHECK(std::fabs(fit.params.gamma - truth.gamma) / truth.gamma < 1e-6);
        CHECK(fit.residual < 1e-6);
    }

    SUBCASE("five percent noise, twenty seeded trials") {
        // eight independent noisy observations per xi, as a binned gain
        // surface would provide
        for (int trial = 0; trial < 20; ++trial) {
            std::mt19937_64 rng(1000 + trial);
            std::normal_distribution<double> noise(0.0, 0.05);
            std::vector<double> xir, noisy, wr;
            for (std::size_t k = 0; k < xi.size(); ++k)
                for (int rep = 0; rep < 8; ++rep) {
                    xir.push_back(xi[k]);
                    noisy.push_back(s2[k] * (1.0 + noise(rng)));
                    wr.push_back(1.0);
                }
            auto fit = fmr::fit_sigmoid_path(xir, noisy, wr);
            CHECK(std::fabs(fit.params.alpha - truth.alpha) / truth.alpha < 0.10);
            CHECK(std::fabs(fit.params.beta - truth.beta) / std::fabs(truth.beta) < 0.10);
            CHECK(std::fabs(fit.params.gamma - truth.gamma) / truth.gamma < 0.10);
        }
    }
}

TEST_CASE("sigmoid fit rejects unusable paths") {
    CHECK_THROWS(fmr::fit_sigmoid_path({1.0, 2.0}, {5.0, 4.0}, {1.0, 1.0}));  // too few points
}
