#include "floatmesh.h"

#include <cstring>
#include <exception>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fmr/harness.hpp"
#include "fmr/parallel.hpp"

namespace {

thread_local std::string g_last_error;

struct io_tag {};       // runtime errors become FMR_ERR_IO
struct runtime_tag {};  // runtime errors become FMR_ERR_RUNTIME

template <typename Tag, typename Fn>
fmr_status guarded(Fn&& fn) {
    try {
        fn();
        return FMR_OK;
    } catch (const std::invalid_argument& e) {
        g_last_error = e.what();
        return FMR_ERR_INVALID;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return std::is_same_v<Tag, io_tag> ? FMR_ERR_IO : FMR_ERR_RUNTIME;
    } catch (...) {
        g_last_error = "unknown error";
        return FMR_ERR_RUNTIME;
    }
}

fmr_status invalid(const char* msg) {
    g_last_error = msg;
    return FMR_ERR_INVALID;
}

}  // namespace

struct fmr_image {
    fmr::Image img;
};
struct fmr_mesh {
    fmr::FloatingMesh mesh;
};
struct fmr_params {
    fmr::StrengthParams params;
};

extern "C" {

const char* fmr_version(void) { return "1.0.0"; }

const char* fmr_last_error(void) { return g_last_error.c_str(); }

void fmr_set_threads(int n) { fmr::set_thread_cap(n); }

fmr_status fmr_image_create(int width, int height, const double* data, fmr_image** out) {
    if (!out) return invalid("out is null");
    if (width <= 0 || height <= 0) return invalid("image dimensions must be positive");
    return guarded<runtime_tag>([&] {
        auto* h = new fmr_image{fmr::Image(width, height)};
        if (data) std::memcpy(h->img.data(), data, sizeof(double) * h->img.size());
        *out = h;
    });
}

fmr_status fmr_image_read_pgm(const char* path, fmr_image** out) {
    if (!path || !out) return invalid("path/out is null");
    return guarded<io_tag>([&] { *out = new fmr_image{fmr::read_pgm(path)}; });
}

fmr_status fmr_image_write_pgm(const fmr_image* img, const char* path) {
    if (!img || !path) return invalid("image/path is null");
    return guarded<io_tag>([&] { fmr::write_pgm(img->img, path); });
}

int fmr_image_width(const fmr_image* img) { return img ? img->img.width() : 0; }
int fmr_image_height(const fmr_image* img) { return img ? img->img.height() : 0; }
const double* fmr_image_data(const fmr_image* img) { return img ? img->img.data() : nullptr; }
void fmr_image_free(fmr_image* img) { delete img; }

fmr_status fmr_psnr(const fmr_image* reference, const fmr_image* test, double* out_db) {
    if (!reference || !test || !out_db) return invalid("null argument");
    return guarded<runtime_tag>([&] { *out_db = fmr::psnr(reference->img, test->img); });
}

fmr_status fmr_mesh_read(const char* path, fmr_mesh** out) {
    if (!path || !out) return invalid("path/out is null");
    return guarded<io_tag>([&] { *out = new fmr_mesh{fmr::read_mesh(path)}; });
}

fmr_status fmr_mesh_write(const fmr_mesh* mesh, const char* path) {
    if (!mesh || !path) return invalid("mesh/path is null");
    return guarded<io_tag>([&] { fmr::write_mesh(mesh->mesh, path); });
}

size_t fmr_mesh_size(const fmr_mesh* mesh) { return mesh ? mesh->mesh.size() : 0; }
void fmr_mesh_free(fmr_mesh* mesh) { delete mesh; }

fmr_status fmr_mesh_from_rotation(const fmr_image* img, double degrees, fmr_mesh** out) {
    if (!img || !out) return invalid("image/out is null");
    return guarded<runtime_tag>([&] { *out = new fmr_mesh{fmr::mesh_from_rotation(img->img, degrees)}; });
}

fmr_status fmr_mesh_sample(const fmr_mesh* mesh, double ratio, uint64_t ref_pixel_count,
                           uint64_t seed, fmr_mesh** out) {
    if (!mesh || !out) return invalid("mesh/out is null");
    return guarded<runtime_tag>([&] {
        *out = new fmr_mesh{fmr::sample_mesh(mesh->mesh, ratio, ref_pixel_count, seed)};
    });
}

fmr_status fmr_params_default(const char* method, fmr_params** out) {
    if (!method || !out) return invalid("method/out is null");
    return guarded<runtime_tag>([&] {
        *out = new fmr_params{fmr::default_params(fmr::method_from_string(method))};
    });
}

fmr_status fmr_params_read(const char* path, fmr_params** out) {
    if (!path || !out) return invalid("path/out is null");
    return guarded<io_tag>([&] { *out = new fmr_params{fmr::read_params(path)}; });
}

fmr_status fmr_params_get(const fmr_params* p, double* alpha, double* beta, double* gamma) {
    if (!p) return invalid("params is null");
    if (alpha) *alpha = p->params.alpha;
    if (beta) *beta = p->params.beta;
    if (gamma) *gamma = p->params.gamma;
    return FMR_OK;
}

fmr_status fmr_params_sigma_opt(const fmr_params* p, double xi, double* out_sigma2) {
    if (!p || !out_sigma2) return invalid("params/out is null");
    return guarded<runtime_tag>([&] { *out_sigma2 = fmr::sigma_opt(xi, p->params); });
}

void fmr_params_free(fmr_params* p) { delete p; }

fmr_status fmr_reconstruct(const fmr_mesh* mesh, int width, int height, const char* method,
                           fmr_image** out) {
    if (!mesh || !method || !out) return invalid("null argument");
    return guarded<runtime_tag>([&] {
        auto res = fmr::reconstruct(mesh->mesh, width, height, fmr::method_from_string(method));
        *out = new fmr_image{std::move(res.image)};
    });
}

fmr_status fmr_compute_xi(const fmr_mesh* mesh, int width, int height, double truncation_radius,
                          fmr_image** out) {
    if (!mesh || !out) return invalid("mesh/out is null");
    return guarded<runtime_tag>([&] {
        double r = truncation_radius > 0.0 ? truncation_radius : fmr::kDefaultTruncationRadius;
        fmr::XiField xi = fmr::compute_xi(mesh->mesh, width, height, r);
        fmr::Image img(width, height);
        img.pixels() = std::move(xi.values);
        *out = new fmr_image{std::move(img)};
    });
}

fmr_status fmr_denoise_uniform(const fmr_image* img, double sigma2, const char* denoiser,
                               fmr_image** out) {
    if (!img || !denoiser || !out) return invalid("null argument");
    return guarded<runtime_tag>([&] {
        auto strength = fmr::uniform_strength(img->img.width(), img->img.height(), sigma2);
        *out = new fmr_image{
            fmr::denoise_adaptive(img->img, strength, fmr::denoiser_from_string(denoiser), {})};
    });
}

fmr_status fmr_denoise_map(const fmr_image* img, const fmr_image* strength, const char* denoiser,
                           fmr_image** out) {
    if (!img || !strength || !denoiser || !out) return invalid("null argument");
    return guarded<runtime_tag>([&] {
        fmr::StrengthMap map{strength->img.width(), strength->img.height(), strength->img.pixels()};
        *out = new fmr_image{
            fmr::denoise_adaptive(img->img, map, fmr::denoiser_from_string(denoiser), {})};
    });
}

fmr_status fmr_refine(const fmr_mesh* mesh, int width, int height, const char* method,
                      const fmr_params* params, const char* denoiser, double truncation_radius,
                      fmr_image** out_initial, fmr_image** out_refined, fmr_image** out_xi) {
    if (!mesh || !method || !denoiser || !out_refined) return invalid("null argument");
    return guarded<runtime_tag>([&] {
        fmr::RefineRequest req;
        req.mesh = mesh->mesh;
        req.width = width;
        req.height = height;
        req.method = fmr::method_from_string(method);
        req.params = params ? params->params : fmr::default_params(req.method);
        req.denoiser = fmr::denoiser_from_string(denoiser);
        if (truncation_radius > 0.0) req.truncation_radius = truncation_radius;
        fmr::RefineResult res = fmr::refine(req);
        if (out_initial) *out_initial = new fmr_image{std::move(res.initial)};
        if (out_xi) {
            fmr::Image xi(width, height);
            xi.pixels() = std::move(res.xi.values);
            *out_xi = new fmr_image{std::move(xi)};
        }
        *out_refined = new fmr_image{std::move(res.refined)};
    });
}

fmr_status fmr_calibrate(const char* corpus_dir, int phi, const char* method,
                         const char* denoiser, const double* ratios, size_t n_ratios,
                         uint64_t seed, const char* out_path, double* out_residual,
                         fmr_params** out_params) {
    if (!corpus_dir || !method || !denoiser || !out_path) return invalid("null argument");
    return guarded<runtime_tag>([&] {
        static const std::vector<double> kDefaultRatios = {0.2, 0.35, 0.5, 0.65, 0.8};
        std::vector<double> ladder =
            ratios ? std::vector<double>(ratios, ratios + n_ratios) : kDefaultRatios;
        if (ladder.empty()) throw std::invalid_argument("calibrate: empty ratio list");

        fmr::InterpolationMethod m = fmr::method_from_string(method);
        fmr::DenoiserKind kind = fmr::denoiser_from_string(denoiser);

        // one corpus item per (image, ratio): the gain surface pools them all
        std::vector<fmr::CorpusItem> corpus;
        for (auto& item : fmr::load_corpus(corpus_dir, phi)) {
            auto ref_pixels = static_cast<std::uint64_t>(item.reference.size());
            for (double r : ladder) {
                fmr::CorpusItem cell;
                cell.id = item.id;
                cell.reference = item.reference;
                cell.mesh = fmr::sample_mesh(item.mesh, r, ref_pixels,
                                             fmr::cell_seed(seed, item.id, r));
                corpus.push_back(std::move(cell));
            }
        }

        fmr::UniformDenoiser uniform = [kind](const fmr::Image& img, double sigma2) {
            auto s = fmr::uniform_strength(img.width(), img.height(), sigma2);
            return fmr::denoise_adaptive(img, s, kind, {});
        };
        fmr::GainSurface surface = fmr::build_gain_surface(corpus, m, uniform);
        fmr::FitResult fit = fmr::fit_sigmoid(surface);
        fit.params.method = m;
        fmr::write_params(fit.params, kind, fit.residual, out_path);
        if (out_residual) *out_residual = fit.residual;
        if (out_params) *out_params = new fmr_params{fit.params};
    });
}

fmr_status fmr_benchmark(const char* spec_path, const char* csv_out_path) {
    if (!spec_path || !csv_out_path) return invalid("null argument");
    return guarded<runtime_tag>([&] {
        fmr::BenchmarkReport report = fmr::run_benchmark(fmr::read_spec(spec_path));
        report.write_csv(csv_out_path);
        for (const auto& row : report.rows)
            if (row.failed) throw std::runtime_error("benchmark cell failed: " + row.image + " " +
                                                     row.method + ": " + row.message);
    });
}

}  // extern "C"
