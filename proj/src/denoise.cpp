#include "fmr/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fmr/parallel.hpp"

namespace fmr {

DenoiserKind denoiser_from_string(const std::string& s) {
    if (s == "bm3d" || s == "BM3D" || s == "bm3d_ht") return DenoiserKind::BM3D_HT;
    if (s == "blend" || s == "BLEND") return DenoiserKind::BLEND;
    throw std::invalid_argument("unknown denoiser: " + s);
}

std::string denoiser_name(DenoiserKind k) {
    return k == DenoiserKind::BM3D_HT ? "bm3d" : "blend";
}

void Bm3dConfig::validate() const {
    if (patch_size < 4) throw std::invalid_argument("bm3d: patch_size must be >= 4");
    if (step < 1) throw std::invalid_argument("bm3d: step must be >= 1");
    if (search_window <= patch_size)
        throw std::invalid_argument("bm3d: search_window must exceed patch_size");
    if (max_group < 1 || (max_group & (max_group - 1)) != 0)
        throw std::invalid_argument("bm3d: max_group must be a power of two");
}

namespace {

// orthonormal DCT-II matrix, rows are basis vectors
std::vector<double> dct_matrix(int n) {
    std::vector<double> m(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        double s = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int i = 0; i < n; ++i)
            m[static_cast<std::size_t>(k) * n + i] =
                s * std::cos(std::numbers::pi * (2 * i + 1) * k / (2.0 * n));
    }
    return m;
}

// patch = D * patch * D^T (forward) or D^T * patch * D (inverse)
void dct2(std::vector<double>& patch, const std::vector<double>& d, int n, bool inverse) {
    std::vector<double> tmp(patch.size());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                double dk = inverse ? d[static_cast<std::size_t>(k) * n + r]
                                    : d[static_cast<std::size_t>(r) * n + k];
                acc += dk * patch[static_cast<std::size_t>(k) * n + c];
            }
            tmp[static_cast<std::size_t>(r) * n + c] = acc;
        }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                double dk = inverse ? d[static_cast<std::size_t>(k) * n + c]
                                    : d[static_cast<std::size_t>(c) * n + k];
                acc += tmp[static_cast<std::size_t>(r) * n + k] * dk;
            }
            patch[static_cast<std::size_t>(r) * n + c] = acc;
        }
}

// full orthonormal Haar decomposition in place, length must be a power of two
void haar_forward(double* v, int len) {
    std::vector<double> tmp(len);
    for (int half = len / 2; half >= 1; half /= 2) {
        for (int i = 0; i < half; ++i) {
            tmp[i] = (v[2 * i] + v[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
            tmp[half + i] = (v[2 * i] - v[2 * i + 1]) * std::numbers::sqrt2 / 2.0;
        }
        std::copy(tmp.begin(), tmp.begin() + 2 * half, v);
    }
}

void haar_inverse(double* v, int len) {
    std::vector<double> tmp(len);
    for (int half = 1; half <= len / 2; half *= 2) {
        for (int i = 0; i < half; ++i) {
            tmp[2 * i] = (v[i] + v[half + i]) * std::numbers::sqrt2 / 2.0;
            tmp[2 * i + 1] = (v[i] - v[half + i]) * std::numbers::sqrt2 / 2.0;
        }
        std::copy(tmp.begin(), tmp.begin() + 2 * half, v);
    }
}

std::vector<int> patch_lattice(int dim, int patch, int step) {
    std::vector<int> out;
    for (int p = 0;; p += step) {
        if (p + patch >= dim) {
            out.push_back(dim - patch);  // snap the last patch to the border
            break;
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace

Image bm3d_hard_threshold(const Image& img, const StrengthMap& strength, const Bm3dConfig& cfg) {
    cfg.validate();
    if (img.width() != strength.width || img.height() != strength.height)
        throw std::invalid_argument("bm3d: strength dimensions mismatch");
    if (img.width() < cfg.patch_size || img.height() < cfg.patch_size)
        throw std::invalid_argument("bm3d: image smaller than patch");

    const int P = cfg.patch_size;
    const int P2 = P * P;
    const int half_search = (cfg.search_window - P) / 2;
    const int W = img.width(), H = img.height();

    std::vector<int> ref_rows = patch_lattice(H, P, cfg.step);
    std::vector<int> ref_cols = patch_lattice(W, P, cfg.step);
    std::vector<double> D = dct_matrix(P);

    struct GroupResult {
        std::vector<std::pair<int, int>> members;  // (row, col) of each patch
        std::vector<double> patches;               // members.size() * P2, filtered
        double weight = 0.0;
    };
    std::vector<GroupResult> results(ref_rows.size() * ref_cols.size());

    parallel_for(ref_rows.size(), [&](std::size_t rr0, std::size_t rr1) {
        std::vector<std::pair<double, std::pair<int, int>>> candidates;
        std::vector<double> group;   // stacked patches, DCT domain
        std::vector<double> column(cfg.max_group);
        for (std::size_t rr = rr0; rr < rr1; ++rr) {
            int pr = ref_rows[rr];
            for (std::size_t cc = 0; cc < ref_cols.size(); ++cc) {
                int pc = ref_cols[cc];

                // block matching in the search window, step-1 lattice
                candidates.clear();
                int r0 = std::max(0, pr - half_search), r1 = std::min(H - P, pr + half_search);
                int c0 = std::max(0, pc - half_search), c1 = std::min(W - P, pc + half_search);
                for (int r = r0; r <= r1; ++r) {
                    for (int c = c0; c <= c1; ++c) {
                        double d2 = 0.0;
                        for (int y = 0; y < P; ++y)
                            for (int x = 0; x < P; ++x) {
                                double diff = img.at(pr + y, pc + x) - img.at(r + y, c + x);
                                d2 += diff * diff;
                            }
                        candidates.emplace_back(d2, std::make_pair(r, c));
                    }
                }
                std::sort(candidates.begin(), candidates.end(),
                          [](const auto& a, const auto& b) {
                              if (a.first != b.first) return a.first < b.first;
                              return a.second < b.second;
                          });
                int found = std::min<int>(cfg.max_group, static_cast<int>(candidates.size()));
                int gsize = 1;
                while (gsize * 2 <= found) gsize *= 2;  // Haar needs a power of two

                GroupResult& res = results[rr * ref_cols.size() + cc];
                res.members.resize(gsize);
                group.assign(static_cast<std::size_t>(gsize) * P2, 0.0);
                std::vector<double> patch(P2);
                for (int m = 0; m < gsize; ++m) {
                    auto [r, c] = candidates[m].second;
                    res.members[m] = {r, c};
                    for (int y = 0; y < P; ++y)
                        for (int x = 0; x < P; ++x) patch[y * P + x] = img.at(r + y, c + x);
                    dct2(patch, D, P, false);
                    std::copy(patch.begin(), patch.end(), group.begin() + static_cast<std::size_t>(m) * P2);
                }

                // sigma from the strength map at the reference patch center
                double s2 = strength.at(std::min(pr + P / 2, H - 1), std::min(pc + P / 2, W - 1));
                double thr = cfg.hard_threshold_lambda * std::sqrt(std::max(s2, 0.0));

                long long retained = 0;
                for (int k = 0; k < P2; ++k) {
                    for (int m = 0; m < gsize; ++m) column[m] = group[static_cast<std::size_t>(m) * P2 + k];
                    haar_forward(column.data(), gsize);
                    for (int m = 0; m < gsize; ++m) {
                        bool group_dc = (k == 0 && m == 0);
                        if (!group_dc && std::fabs(column[m]) < thr)
                            column[m] = 0.0;
                        else if (column[m] != 0.0)
                            ++retained;
                    }
                    haar_inverse(column.data(), gsize);
                    for (int m = 0; m < gsize; ++m) group[static_cast<std::size_t>(m) * P2 + k] = column[m];
                }

                res.weight = 1.0 / static_cast<double>(std::max<long long>(retained, 1));
                res.patches.resize(group.size());
                for (int m = 0; m < gsize; ++m) {
                    std::copy(group.begin() + static_cast<std::size_t>(m) * P2,
                              group.begin() + static_cast<std::size_t>(m + 1) * P2, patch.begin());
                    dct2(patch, D, P, true);
                    std::copy(patch.begin(), patch.end(),
                              res.patches.begin() + static_cast<std::size_t>(m) * P2);
                }
            }
        }
    });

    // aggregation in fixed reference order, independent of the worker count
    Image acc(W, H, 0.0);
    Image wsum(W, H, 0.0);
    for (const auto& res : results) {
        for (std::size_t m = 0; m < res.members.size(); ++m) {
            auto [r, c] = res.members[m];
            const double* p = res.patches.data() + m * P2;
            for (int y = 0; y < P; ++y)
                for (int x = 0; x < P; ++x) {
                    acc.at(r + y, c + x) += res.weight * p[y * P + x];
                    wsum.at(r + y, c + x) += res.weight;
                }
        }
    }
    Image out(W, H);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double w = wsum.data()[k];
        out.data()[k] = w > 0 ? acc.data()[k] / w : img.data()[k];
    }
    return out;
}

Image blend_denoise(const Image& img, const StrengthMap& strength) {
    if (img.width() != strength.width || img.height() != strength.height)
        throw std::invalid_argument("blend: strength dimensions mismatch");

    // fixed 5x5 Gaussian, std 1.2, unit sum
    static const std::vector<double> kernel = [] {
        std::vector<double> k(25);
        double sum = 0.0;
        for (int y = -2; y <= 2; ++y)
            for (int x = -2; x <= 2; ++x) {
                double v = std::exp(-(x * x + y * y) / (2.0 * 1.2 * 1.2));
                k[(y + 2) * 5 + (x + 2)] = v;
                sum += v;
            }
        for (double& v : k) v /= sum;
        return k;
    }();

    int w = img.width(), h = img.height();
    auto mirror = [](int i, int n) {
        if (n == 1) return 0;
        int period = 2 * n - 2;
        i = ((i % period) + period) % period;
        return i < n ? i : period - i;
    };

    Image out(w, h);
    parallel_for(h, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            for (int c = 0; c < w; ++c) {
                double sm = 0.0;
                for (int y = -2; y <= 2; ++y)
                    for (int x = -2; x <= 2; ++x)
                        sm += kernel[(y + 2) * 5 + (x + 2)] *
                              img.at(mirror(static_cast<int>(r) + y, h), mirror(c + x, w));
                double s2 = strength.at(static_cast<int>(r), c);
                double wgt = s2 / (s2 + 100.0);
                out.at(static_cast<int>(r), c) = (1.0 - wgt) * img.at(static_cast<int>(r), c) + wgt * sm;
            }
        }
    });
    return out;
}

Image denoise_adaptive(const Image& img, const StrengthMap& strength, DenoiserKind kind,
                       const Bm3dConfig& cfg) {
    if (img.width() != strength.width || img.height() != strength.height)
        throw std::invalid_argument("denoise: strength dimensions mismatch");
    bool all_zero = std::all_of(strength.values.begin(), strength.values.end(),
                                [](double v) { return v == 0.0; });
    Image out = all_zero ? img
               : (kind == DenoiserKind::BM3D_HT ? bm3d_hard_threshold(img, strength, cfg)
                                                : blend_denoise(img, strength));
    for (std::size_t k = 0; k < out.size(); ++k)
        out.data()[k] = std::clamp(out.data()[k], 0.0, 255.0);
    return out;
}

}  // namespace fmr
