#include "fmr/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fmr/parallel.hpp"

namespace fmr {

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("image dimensions must be >= 1");
    data_.assign(static_cast<std::size_t>(width) * height, fill);
}

double mse(const Image& a, const Image& b) {
    if (!a.same_size(b)) throw std::invalid_argument("mse: dimension mismatch");
    double acc = 0.0;
    const double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = pa[k] - pb[k];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

double psnr(const Image& reference, const Image& test) {
    double e = mse(reference, test);
    if (e <= 0.0) return 100.0;
    double db = 10.0 * std::log10(255.0 * 255.0 / e);
    return std::min(db, 100.0);
}

std::vector<double> lowpass_kernel(double cutoff) {
    if (!(cutoff > 0.0) || cutoff > 1.0)
        throw std::invalid_argument("lowpass cutoff must be in (0, 1]");
    int half = 4 * static_cast<int>(std::ceil(1.0 / cutoff));
    int len = 2 * half + 1;
    std::vector<double> h(len);
    double sum = 0.0;
    for (int n = -half; n <= half; ++n) {
        double x = std::numbers::pi * cutoff * n;
        double sinc = (n == 0) ? 1.0 : std::sin(x) / x;
        double hamming = 0.54 + 0.46 * std::cos(std::numbers::pi * n / half);
        double v = cutoff * sinc * hamming;
        h[n + half] = v;
        sum += v;
    }
    for (double& v : h) v /= sum;
    return h;
}

namespace {

// index with symmetric (mirror, no repeated edge sample for size>1) extension
inline int mirror(int i, int n) {
    if (n == 1) return 0;
    int period = 2 * n - 2;
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

}  // namespace

Image separable_lowpass(const Image& img, double cutoff) {
    std::vector<double> h = lowpass_kernel(cutoff);
    int half = (static_cast<int>(h.size()) - 1) / 2;
    int w = img.width(), ht = img.height();

    Image tmp(w, ht);
    // rows
    parallel_for(ht, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int k = -half; k <= half; ++k)
                    acc += h[k + half] * img.at(static_cast<int>(r), mirror(c + k, w));
                tmp.at(static_cast<int>(r), c) = acc;
            }
        }
    });
    Image out(w, ht);
    // columns
    parallel_for(ht, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            for (int c = 0; c < w; ++c) {
                double acc = 0.0;
                for (int k = -half; k <= half; ++k)
                    acc += h[k + half] * tmp.at(mirror(static_cast<int>(r) + k, ht), c);
                out.at(static_cast<int>(r), c) = acc;
            }
        }
    });
    return out;
}

namespace {

void skip_pgm_junk(std::istream& in) {
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

}  // namespace

Image read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image file: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P2")
        throw std::runtime_error("not a PGM (P5/P2) file: " + path);
    skip_pgm_junk(in);
    int w, h, maxval;
    in >> w;
    skip_pgm_junk(in);
    in >> h;
    skip_pgm_junk(in);
    in >> maxval;
    if (!in || w < 1 || h < 1) throw std::runtime_error("bad PGM header: " + path);
    if (maxval != 255) throw std::runtime_error("only 8-bit PGM supported: " + path);

    Image img(w, h);
    if (magic == "P5") {
        in.get();  // single whitespace after maxval
        std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (!in) throw std::runtime_error("truncated PGM data: " + path);
        for (std::size_t k = 0; k < raw.size(); ++k) img.data()[k] = raw[k];
    } else {
        for (std::size_t k = 0; k < img.size(); ++k) {
            int v;
            in >> v;
            if (!in) throw std::runtime_error("truncated PGM data: " + path);
            img.data()[k] = v;
        }
    }
    return img;
}

namespace {

inline unsigned char quantize(double v) {
    double r = std::round(std::fabs(v)) * (v < 0 ? -1.0 : 1.0);  // half away from zero
    return static_cast<unsigned char>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

void write_pgm(const Image& img, const std::string& path, bool plain) {
    std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write image file: " + path);
        if (plain) {
            out << "P2\n" << img.width() << " " << img.height() << "\n255\n";
            for (int r = 0; r < img.height(); ++r) {
                for (int c = 0; c < img.width(); ++c)
                    out << static_cast<int>(quantize(img.at(r, c))) << (c + 1 == img.width() ? '\n' : ' ');
            }
        } else {
            out << "P5\n" << img.width() << " " << img.height() << "\n255\n";
            std::vector<unsigned char> raw(img.size());
            for (std::size_t k = 0; k < raw.size(); ++k) raw[k] = quantize(img.data()[k]);
            out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        }
        if (!out) throw std::runtime_error("write failed: " + path);
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace fmr
