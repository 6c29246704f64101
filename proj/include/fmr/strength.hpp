#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fmr/effective_data.hpp"
#include "fmr/image.hpp"
#include "fmr/interpolate.hpp"

namespace fmr {

// Sigmoid law mapping effective data to denoising strength:
//   sigma2(xi) = alpha * (1 - 1 / (1 + e^{-(xi/gamma + beta)}))
struct StrengthParams {
    double alpha = 1.0;  // scale, luminance^2
    double beta = 0.0;   // offset
    double gamma = 1.0;  // decay
    InterpolationMethod method = InterpolationMethod::CI;

    void validate() const;
};

// BM3D-calibrated defaults per interpolation method; recalibrate for other
// denoisers.
StrengthParams default_params(InterpolationMethod method);

double sigma_opt(double xi, const StrengthParams& params);

struct StrengthMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // per-pixel sigma^2, >= 0

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
};

StrengthMap uniform_strength(int width, int height, double sigma2);
StrengthMap strength_map_from_xi(const XiField& xi, const StrengthParams& params);

// Per-pixel gain of denoising: (I - initial)^2 - (I - denoised)^2.
std::vector<double> gain(const Image& ref, const Image& initial, const Image& denoised);

struct GainSurface {
    std::vector<double> xi_bin_edges;   // ascending, bins = edges.size()-1
    std::vector<double> sigma_grid;     // tested sigma^2 values, ascending
    std::vector<double> mean_gain;      // [bin * sigma_grid.size() + s]
    std::vector<long long> population;  // per bin (pixel count)
    std::vector<double> xi_bin_mean;    // mean xi per bin

    std::size_t bins() const { return population.size(); }
    bool populated(std::size_t bin) const { return population[bin] > 0; }
    double cell(std::size_t bin, std::size_t s) const { return mean_gain[bin * sigma_grid.size() + s]; }
};

inline const std::vector<double> kDefaultSigmaGrid = {5, 10, 15, 20, 30, 40, 60, 80, 100, 120};
inline constexpr int kDefaultXiBins = 40;

using UniformDenoiser = std::function<Image(const Image&, double sigma2)>;

struct CorpusItem {
    std::string id;
    Image reference;
    FloatingMesh mesh;
};

// Reconstructs each corpus item, denoises at every sigma^2 in the grid at
// uniform strength and accumulates per-(xi bin, sigma^2) mean gains.
// Bins are xi quantiles pooled over the corpus.
GainSurface build_gain_surface(const std::vector<CorpusItem>& corpus, InterpolationMethod method,
                               const UniformDenoiser& denoiser,
                               const std::vector<double>& sigma_grid = kDefaultSigmaGrid,
                               int xi_bin_count = kDefaultXiBins,
                               double truncation_radius = kDefaultTruncationRadius);

struct FitResult {
    StrengthParams params;
    double residual = 0.0;  // weighted RMS of the fit to the max-gain path
    int iterations = 0;
};

// Extracts the per-bin argmax sigma^2 (the max-gain path) and fits the
// sigmoid by population-weighted least squares: multi-start grid search
// followed by Gauss-Newton refinement.
FitResult fit_sigmoid(const GainSurface& surface);

// Same fit applied to an explicit (xi, sigma2, weight) path; used by the
// regression tests and by fit_sigmoid internally.
FitResult fit_sigmoid_path(const std::vector<double>& xi, const std::vector<double>& sigma2,
                           const std::vector<double>& weight);

}  // namespace fmr
