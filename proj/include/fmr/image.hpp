#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fmr {

// Regular-grid grayscale image. Luminance is kept real-valued through the
// whole pipeline; quantization to 8 bit happens only on file export.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    double& at(int row, int col) { return data_[static_cast<std::size_t>(row) * width_ + col]; }
    double at(int row, int col) const { return data_[static_cast<std::size_t>(row) * width_ + col]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& pixels() { return data_; }
    const std::vector<double>& pixels() const { return data_; }

    bool same_size(const Image& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

double mse(const Image& a, const Image& b);

// 10*log10(255^2 / mse), capped at 100 dB for zero error.
double psnr(const Image& reference, const Image& test);

// Separable windowed-sinc low pass (Hamming window, half-width
// 4*ceil(1/cutoff) taps per side, unit-sum kernel, mirror boundaries).
// cutoff is a normalized frequency in (0, 1], 1 = Nyquist.
Image separable_lowpass(const Image& img, double cutoff);

std::vector<double> lowpass_kernel(double cutoff);

// PGM codec, P5 and P2 on read, P5 on write (P2 with plain=true).
// Export clamps to [0,255] and rounds half away from zero.
Image read_pgm(const std::string& path);
void write_pgm(const Image& img, const std::string& path, bool plain = false);

}  // namespace fmr
