#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fmr/pipeline.hpp"

namespace fmr {

struct ExperimentSpec {
    std::string corpus_dir;
    int phi = 5;
    std::vector<double> sample_ratios;  // strictly ascending, in (0, 1]
    std::vector<InterpolationMethod> methods;
    DenoiserKind denoiser = DenoiserKind::BM3D_HT;
    std::map<InterpolationMethod, StrengthParams> params;  // defaults when absent
    std::uint64_t seed = 0;
    double truncation_radius = kDefaultTruncationRadius;
    Bm3dConfig bm3d;

    void validate() const;
    StrengthParams params_for(InterpolationMethod m) const;
};

// Plain-text key=value spec file: corpus_dir, phi, ratios (comma list),
// methods (comma list), denoiser, seed, truncation_radius, params_<method>.
ExperimentSpec read_spec(const std::string& path);

struct BenchmarkRow {
    std::string image;
    std::string method;
    double ratio = 0.0;
    double psnr_initial = 0.0;
    double psnr_refined = 0.0;
    double gain = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string message;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;  // sorted by (image, method, ratio)

    double mean_gain(const std::string& method, double ratio) const;
    void write_csv(const std::string& path) const;
};

// Low-pass with cutoff 1/phi, then keep pixels at rows/cols == 0 (mod phi).
Image make_reference(const Image& src, int phi);

// Every filtered fine-grid pixel off the coarse lattice becomes a sample at
// (x = col/phi, y = row/phi) in reference-grid units. `src` must already be
// antialias-filtered (make_reference applies the same filter).
FloatingMesh make_floating_mesh(const Image& filtered_src, int phi);

// Seed for one (image, ratio) cell: spec seed xored with a hash of both.
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& image_id, double ratio);

// Sorted .pgm files from a directory; ids are the file stems.
std::vector<CorpusItem> load_corpus(const std::string& dir, int phi);

BenchmarkReport run_benchmark(const ExperimentSpec& spec);

struct ErrorVsXiRow {
    std::string method;
    int decile = 0;       // 0..9
    double mean_xi = 0.0;
    double mean_eps = 0.0;  // mean squared reconstruction error of the initial estimate
    long long population = 0;
};

std::vector<ErrorVsXiRow> error_vs_xi_study(const ExperimentSpec& spec);

struct FixedVsAdaptiveRow {
    double ratio = 0.0;
    std::vector<double> fixed_gain;  // mean PSNR gain per fixed sigma^2, dB
    double adaptive_gain = 0.0;      // mean PSNR gain of the adaptive pipeline, dB
};

// Uses the first method in the spec for the initial estimate.
std::vector<FixedVsAdaptiveRow> fixed_vs_adaptive_study(const ExperimentSpec& spec,
                                                        const std::vector<double>& fixed_sigma_grid);

// Parameter files are plain-text key=value: method, alpha, beta, gamma,
// denoiser, residual.
StrengthParams read_params(const std::string& path);
void write_params(const StrengthParams& params, DenoiserKind denoiser, double residual,
                  const std::string& path);

}  // namespace fmr
