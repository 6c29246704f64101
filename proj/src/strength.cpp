#include "fmr/strength.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fmr/parallel.hpp"

namespace fmr {

void StrengthParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("strength params: alpha must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("strength params: gamma must be > 0");
    if (!std::isfinite(beta)) throw std::invalid_argument("strength params: beta must be finite");
}

StrengthParams default_params(InterpolationMethod method) {
    switch (method) {
        case InterpolationMethod::LI: return {73.69, -0.71, 0.68, method};
        case InterpolationMethod::CI: return {105.54, 0.08, 0.97, method};
        case InterpolationMethod::NI: return {44.14, -3.64, 0.27, method};
        case InterpolationMethod::NN: return {84.38, 0.40, 4.17, method};
    }
    throw std::invalid_argument("unknown method");
}

double sigma_opt(double xi, const StrengthParams& params) {
    // alpha * (1 - 1/(1+e^{-t})) == alpha / (1 + e^{t}), stable for large xi
    double t = xi / params.gamma + params.beta;
    if (t > 700.0) return 0.0;
    return params.alpha / (1.0 + std::exp(t));
}

StrengthMap uniform_strength(int width, int height, double sigma2) {
    if (sigma2 < 0.0) throw std::invalid_argument("strength must be >= 0");
    StrengthMap m;
    m.width = width;
    m.height = height;
    m.values.assign(static_cast<std::size_t>(width) * height, sigma2);
    return m;
}

StrengthMap strength_map_from_xi(const XiField& xi, const StrengthParams& params) {
    params.validate();
    StrengthMap m;
    m.width = xi.width;
    m.height = xi.height;
    m.values.resize(xi.values.size());
    for (std::size_t k = 0; k < xi.values.size(); ++k) m.values[k] = sigma_opt(xi.values[k], params);
    return m;
}

std::vector<double> gain(const Image& ref, const Image& initial, const Image& denoised) {
    if (!ref.same_size(initial) || !ref.same_size(denoised))
        throw std::invalid_argument("gain: dimension mismatch");
    std::vector<double> g(ref.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double e0 = ref.data()[k] - initial.data()[k];
        double e1 = ref.data()[k] - denoised.data()[k];
        g[k] = e0 * e0 - e1 * e1;
    }
    return g;
}

GainSurface build_gain_surface(const std::vector<CorpusItem>& corpus, InterpolationMethod method,
                               const UniformDenoiser& denoiser, const std::vector<double>& sigma_grid,
                               int xi_bin_count, double truncation_radius) {
    if (corpus.empty()) throw std::invalid_argument("gain surface: empty corpus");
    if (sigma_grid.empty() || !std::is_sorted(sigma_grid.begin(), sigma_grid.end()))
        throw std::invalid_argument("gain surface: sigma grid must be non-empty ascending");
    if (xi_bin_count < 2) throw std::invalid_argument("gain surface: need at least 2 xi bins");

    struct ItemData {
        Image initial;
        XiField xi;
    };
    std::vector<ItemData> prepared;
    prepared.reserve(corpus.size());
    std::vector<double> all_xi;
    for (const auto& item : corpus) {
        ItemData d;
        d.initial = reconstruct(item.mesh, item.reference.width(), item.reference.height(), method).image;
        d.xi = compute_xi(item.mesh, item.reference.width(), item.reference.height(), truncation_radius);
        all_xi.insert(all_xi.end(), d.xi.values.begin(), d.xi.values.end());
        prepared.push_back(std::move(d));
    }

    // equal-population bins over the pooled xi distribution
    std::sort(all_xi.begin(), all_xi.end());
    GainSurface surf;
    surf.sigma_grid = sigma_grid;
    surf.xi_bin_edges.resize(xi_bin_count + 1);
    for (int b = 0; b <= xi_bin_count; ++b) {
        std::size_t idx = std::min(all_xi.size() - 1,
                                   static_cast<std::size_t>(static_cast<double>(b) / xi_bin_count *
                                                            static_cast<double>(all_xi.size())));
        surf.xi_bin_edges[b] = all_xi[idx];
    }
    surf.xi_bin_edges.front() = all_xi.front();
    surf.xi_bin_edges.back() = all_xi.back();

    std::size_t ns = sigma_grid.size();
    std::vector<double> gain_sum(static_cast<std::size_t>(xi_bin_count) * ns, 0.0);
    std::vector<double> xi_sum(xi_bin_count, 0.0);
    surf.population.assign(xi_bin_count, 0);

    auto bin_of = [&](double x) {
        auto it = std::upper_bound(surf.xi_bin_edges.begin() + 1, surf.xi_bin_edges.end() - 1, x);
        return static_cast<std::size_t>(it - (surf.xi_bin_edges.begin() + 1));
    };

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& d = prepared[i];
        const auto& ref = corpus[i].reference;
        for (std::size_t s = 0; s < ns; ++s) {
            Image den = denoiser(d.initial, sigma_grid[s]);
            std::vector<double> g = gain(ref, d.initial, den);
            for (std::size_t k = 0; k < g.size(); ++k)
                gain_sum[bin_of(d.xi.values[k]) * ns + s] += g[k];
        }
        for (std::size_t k = 0; k < d.xi.values.size(); ++k) {
            std::size_t b = bin_of(d.xi.values[k]);
            surf.population[b] += 1;
            xi_sum[b] += d.xi.values[k];
        }
    }

    surf.mean_gain.assign(gain_sum.size(), 0.0);
    surf.xi_bin_mean.assign(xi_bin_count, 0.0);
    for (int b = 0; b < xi_bin_count; ++b) {
        if (surf.population[b] == 0) continue;  // unpopulated cells stay unmarked, not zero
        surf.xi_bin_mean[b] = xi_sum[b] / static_cast<double>(surf.population[b]);
        for (std::size_t s = 0; s < ns; ++s)
            surf.mean_gain[b * ns + s] =
                gain_sum[b * ns + s] / static_cast<double>(surf.population[b]);
    }
    return surf;
}

namespace {

double model(double xi, double alpha, double beta, double gamma) {
    double t = xi / gamma + beta;
    if (t > 700.0) return 0.0;
    return alpha / (1.0 + std::exp(t));
}

double weighted_sse(const std::vector<double>& xi, const std::vector<double>& y,
                    const std::vector<double>& w, double a, double b, double g) {
    double sse = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) {
        double r = y[k] - model(xi[k], a, b, g);
        sse += w[k] * r * r;
    }
    return sse;
}

bool solve3(double A[3][3], double r[3], double x[3]) {
    // Gaussian elimination with partial pivoting
    int idx[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::fabs(A[idx[row]][col]) > std::fabs(A[idx[piv]][col])) piv = row;
        std::swap(idx[col], idx[piv]);
        double d = A[idx[col]][col];
        if (std::fabs(d) < 1e-300) return false;
        for (int row = col + 1; row < 3; ++row) {
            double f = A[idx[row]][col] / d;
            for (int c2 = col; c2 < 3; ++c2) A[idx[row]][c2] -= f * A[idx[col]][c2];
            r[idx[row]] -= f * r[idx[col]];
        }
    }
    for (int col = 2; col >= 0; --col) {
        double acc = r[idx[col]];
        for (int c2 = col + 1; c2 < 3; ++c2) acc -= A[idx[col]][c2] * x[c2];
        if (std::fabs(A[idx[col]][col]) < 1e-300) return false;
        x[col] = acc / A[idx[col]][col];
    }
    return true;
}

}  // namespace

FitResult fit_sigmoid_path(const std::vector<double>& xi, const std::vector<double>& sigma2,
                           const std::vector<double>& weight) {
    if (xi.size() < 3 || xi.size() != sigma2.size() || xi.size() != weight.size())
        throw std::invalid_argument("sigmoid fit: need >= 3 weighted path points");
    {
        std::vector<double> distinct = sigma2;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 2)
            throw std::invalid_argument("sigmoid fit: insufficient distinct path values");
    }

    double smax = *std::max_element(sigma2.begin(), sigma2.end());
    if (smax <= 0) smax = 1.0;

    // multi-start grid search
    double best_a = smax, best_b = 0.0, best_g = 1.0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double af : {0.5, 1.0, 2.0}) {
        double a = af * smax;
        for (double b = -5.0; b <= 5.0 + 1e-9; b += 0.5) {
            for (int gi = 0; gi < 24; ++gi) {
                double g = 0.05 * std::pow(10.0 / 0.05, gi / 23.0);
                double sse = weighted_sse(xi, sigma2, weight, a, b, g);
                if (sse < best_sse) {
                    best_sse = sse;
                    best_a = a;
                    best_b = b;
                    best_g = g;
                }
            }
        }
    }

    // Gauss-Newton with Levenberg damping
    double a = best_a, b = best_b, g = best_g;
    double sse = best_sse;
    double lambda = 1e-3;
    int iters = 0;
    const int cap = 500;
    bool converged = false;
    for (; iters < cap; ++iters) {
        double JtJ[3][3] = {{0}}, Jtr[3] = {0, 0, 0};
        for (std::size_t k = 0; k < xi.size(); ++k) {
            double t = xi[k] / g + b;
            double et = std::exp(std::min(t, 700.0));
            double denom = 1.0 + et;
            double m = a / denom;
            double da = 1.0 / denom;
            double common = -a * et / (denom * denom);
            double db = common;
            double dg = common * (-xi[k] / (g * g));
            double r = sigma2[k] - m;
            double J[3] = {da, db, dg};
            for (int p = 0; p < 3; ++p) {
                Jtr[p] += weight[k] * J[p] * r;
                for (int q = 0; q < 3; ++q) JtJ[p][q] += weight[k] * J[p] * J[q];
            }
        }
        double A[3][3];
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) A[p][q] = JtJ[p][q] + (p == q ? lambda * JtJ[p][p] : 0.0);
        double rhs[3] = {Jtr[0], Jtr[1], Jtr[2]};
        double step[3];
        if (!solve3(A, rhs, step)) break;
        double na = a + step[0], nb = b + step[1], ng = g + step[2];
        double scale = 1.0;
        while ((na <= 0.0 || ng <= 0.0) && scale > 1e-8) {
            scale *= 0.5;
            na = a + scale * step[0];
            nb = b + scale * step[1];
            ng = g + scale * step[2];
        }
        double nsse = weighted_sse(xi, sigma2, weight, na, nb, ng);
        if (nsse <= sse) {
            double rel = (sse - nsse) / std::max(sse, 1e-300);
            a = na;
            b = nb;
            g = ng;
            sse = nsse;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-14 || sse < 1e-22) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                converged = true;  // stuck at a (local) minimum
                break;
            }
        }
    }
    if (!converged && iters >= cap) {
        std::ostringstream os;
        os << "sigmoid fit did not converge after " << cap << " iterations; best so far alpha="
           << a << " beta=" << b << " gamma=" << g << " sse=" << sse;
        throw std::runtime_error(os.str());
    }

    FitResult res;
    res.params.alpha = a;
    res.params.beta = b;
    res.params.gamma = g;
    res.iterations = iters;
    double wsum = 0.0;
    for (double w : weight) wsum += w;
    res.residual = std::sqrt(sse / std::max(wsum, 1e-300));
    return res;
}

FitResult fit_sigmoid(const GainSurface& surface) {
    std::vector<double> xi, s2, w;
    for (std::size_t b = 0; b < surface.bins(); ++b) {
        if (!surface.populated(b)) continue;
        std::size_t arg = 0;
        for (std::size_t s = 1; s < surface.sigma_grid.size(); ++s)
            if (surface.cell(b, s) > surface.cell(b, arg)) arg = s;
        xi.push_back(surface.xi_bin_mean[b]);
        s2.push_back(surface.sigma_grid[arg]);
        w.push_back(static_cast<double>(surface.population[b]));
    }
    if (xi.size() < 3)
        throw std::invalid_argument("sigmoid fit: fewer than 3 populated bins");
    return fit_sigmoid_path(xi, s2, w);
}

}  // namespace fmr
