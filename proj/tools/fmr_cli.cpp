// Command-line front end. Talks to the library exclusively through the C API.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "floatmesh.h"

namespace {

int fail(fmr_status st) {
    std::fprintf(stderr, "error: %s\n", fmr_last_error());
    return st == FMR_ERR_INVALID ? 2 : 1;
}

#define CHECK(call)                          \
    do {                                     \
        fmr_status st_ = (call);             \
        if (st_ != FMR_OK) return fail(st_); \
    } while (0)

using image_ptr = std::unique_ptr<fmr_image, decltype(&fmr_image_free)>;
using mesh_ptr = std::unique_ptr<fmr_mesh, decltype(&fmr_mesh_free)>;
using params_ptr = std::unique_ptr<fmr_params, decltype(&fmr_params_free)>;

image_ptr own(fmr_image* p) { return {p, &fmr_image_free}; }
mesh_ptr own(fmr_mesh* p) { return {p, &fmr_mesh_free}; }
params_ptr own(fmr_params* p) { return {p, &fmr_params_free}; }

int write_grid_csv(const fmr_image* img, const std::string& path) {
    std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "w");
    if (!f) {
        std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
        return 1;
    }
    int w = fmr_image_width(img), h = fmr_image_height(img);
    const double* d = fmr_image_data(img);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c)
            std::fprintf(f, c + 1 < w ? "%.17g," : "%.17g\n", d[static_cast<size_t>(r) * w + c]);
    }
    bool ok = std::fclose(f) == 0 && std::rename(tmp.c_str(), path.c_str()) == 0;
    if (!ok) {
        std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
        std::remove(tmp.c_str());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"floating-mesh image reconstruction toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fmr_version());

    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = all hardware threads)")
        ->check(CLI::NonNegativeNumber);

    // reconstruct
    std::string mesh_path, out_path, method = "ci", denoiser = "bm3d", params_path;
    int width = 0, height = 0;
    double radius = 0.0;
    auto* rec = app.add_subcommand("reconstruct", "interpolate a floating mesh onto a pixel grid");
    rec->add_option("--mesh", mesh_path, "mesh CSV (x,y,value)")->required();
    rec->add_option("--width", width)->required()->check(CLI::PositiveNumber);
    rec->add_option("--height", height)->required()->check(CLI::PositiveNumber);
    rec->add_option("--method", method, "nn|li|ci|ni");
    rec->add_option("--out", out_path, "output PGM")->required();

    // refine
    std::string initial_out, xi_out;
    auto* ref = app.add_subcommand("refine", "reconstruct and adaptively denoise");
    ref->add_option("--mesh", mesh_path)->required();
    ref->add_option("--width", width)->required()->check(CLI::PositiveNumber);
    ref->add_option("--height", height)->required()->check(CLI::PositiveNumber);
    ref->add_option("--method", method, "nn|li|ci|ni");
    ref->add_option("--denoiser", denoiser, "bm3d|blend");
    ref->add_option("--params", params_path, "strength params file (default: built-in)");
    ref->add_option("--radius", radius, "xi truncation radius");
    ref->add_option("--out", out_path, "refined PGM")->required();
    ref->add_option("--initial-out", initial_out, "also write the raw reconstruction");
    ref->add_option("--xi-out", xi_out, "also write the xi field as CSV");

    // denoise
    std::string input_path, strength_path;
    double sigma2 = -1.0;
    auto* den = app.add_subcommand("denoise", "denoise a PGM image");
    den->add_option("--input", input_path)->required();
    den->add_option("--sigma2", sigma2, "uniform strength (noise variance)");
    den->add_option("--strength", strength_path, "per-pixel sigma^2 map as PGM");
    den->add_option("--denoiser", denoiser, "bm3d|blend");
    den->add_option("--out", out_path)->required();

    // xi
    auto* xi = app.add_subcommand("xi", "effective-data field of a mesh, written as CSV");
    xi->add_option("--mesh", mesh_path)->required();
    xi->add_option("--width", width)->required()->check(CLI::PositiveNumber);
    xi->add_option("--height", height)->required()->check(CLI::PositiveNumber);
    xi->add_option("--radius", radius, "truncation radius (default 25)");
    xi->add_option("--out", out_path)->required();

    // calibrate
    std::string corpus_dir;
    int phi = 5;
    std::uint64_t seed = 0;
    std::vector<double> ratios;
    auto* cal = app.add_subcommand("calibrate", "fit the strength sigmoid on an image corpus");
    cal->add_option("--corpus", corpus_dir, "directory of .pgm images")->required();
    cal->add_option("--phi", phi, "decimation factor")->check(CLI::Range(2, 64));
    cal->add_option("--method", method, "nn|li|ci|ni");
    cal->add_option("--denoiser", denoiser, "bm3d|blend");
    cal->add_option("--ratios", ratios, "sampling ratios to pool")->delimiter(',');
    cal->add_option("--seed", seed);
    cal->add_option("--out", out_path, "output params file")->required();

    // bench
    std::string spec_path;
    auto* ben = app.add_subcommand("bench", "run the benchmark described by a spec file");
    ben->add_option("--spec", spec_path, "key=value experiment spec")->required();
    ben->add_option("--out", out_path, "output CSV")->required();

    // mesh-rotate
    double degrees = 0.0;
    auto* rot = app.add_subcommand("mesh-rotate", "rotate image pixels into a floating mesh");
    rot->add_option("--input", input_path, "input PGM")->required();
    rot->add_option("--degrees", degrees, "rotation angle")->required();
    rot->add_option("--out", out_path, "output mesh CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    fmr_set_threads(threads);

    if (rec->parsed()) {
        fmr_mesh* m = nullptr;
        CHECK(fmr_mesh_read(mesh_path.c_str(), &m));
        auto mesh = own(m);
        fmr_image* img = nullptr;
        CHECK(fmr_reconstruct(mesh.get(), width, height, method.c_str(), &img));
        auto out = own(img);
        CHECK(fmr_image_write_pgm(out.get(), out_path.c_str()));
        return 0;
    }

    if (ref->parsed()) {
        fmr_mesh* m = nullptr;
        CHECK(fmr_mesh_read(mesh_path.c_str(), &m));
        auto mesh = own(m);
        params_ptr params = own(static_cast<fmr_params*>(nullptr));
        if (!params_path.empty()) {
            fmr_params* p = nullptr;
            CHECK(fmr_params_read(params_path.c_str(), &p));
            params = own(p);
        }
        fmr_image *initial = nullptr, *refined = nullptr, *xi_field = nullptr;
        CHECK(fmr_refine(mesh.get(), width, height, method.c_str(), params.get(), denoiser.c_str(),
                         radius, initial_out.empty() ? nullptr : &initial, &refined,
                         xi_out.empty() ? nullptr : &xi_field));
        auto refined_p = own(refined);
        auto initial_p = own(initial);
        auto xi_p = own(xi_field);
        if (initial_p) CHECK(fmr_image_write_pgm(initial_p.get(), initial_out.c_str()));
        if (xi_p)
            if (int rc = write_grid_csv(xi_p.get(), xi_out); rc != 0) return rc;
        CHECK(fmr_image_write_pgm(refined_p.get(), out_path.c_str()));
        return 0;
    }

    if (den->parsed()) {
        if ((sigma2 < 0.0) == strength_path.empty()) {
            std::fprintf(stderr, "error: pass exactly one of --sigma2 or --strength\n");
            return 2;
        }
        fmr_image* in = nullptr;
        CHECK(fmr_image_read_pgm(input_path.c_str(), &in));
        auto input = own(in);
        fmr_image* result = nullptr;
        if (!strength_path.empty()) {
            fmr_image* s = nullptr;
            CHECK(fmr_image_read_pgm(strength_path.c_str(), &s));
            auto strength = own(s);
            CHECK(fmr_denoise_map(input.get(), strength.get(), denoiser.c_str(), &result));
        } else {
            CHECK(fmr_denoise_uniform(input.get(), sigma2, denoiser.c_str(), &result));
        }
        auto out = own(result);
        CHECK(fmr_image_write_pgm(out.get(), out_path.c_str()));
        return 0;
    }

    if (xi->parsed()) {
        fmr_mesh* m = nullptr;
        CHECK(fmr_mesh_read(mesh_path.c_str(), &m));
        auto mesh = own(m);
        fmr_image* field = nullptr;
        CHECK(fmr_compute_xi(mesh.get(), width, height, radius, &field));
        auto out = own(field);
        return write_grid_csv(out.get(), out_path);
    }

    if (cal->parsed()) {
        double residual = 0.0;
        fmr_params* p = nullptr;
        CHECK(fmr_calibrate(corpus_dir.c_str(), phi, method.c_str(), denoiser.c_str(),
                            ratios.empty() ? nullptr : ratios.data(), ratios.size(), seed,
                            out_path.c_str(), &residual, &p));
        auto params = own(p);
        double alpha = 0, beta = 0, gamma = 0;
        CHECK(fmr_params_get(params.get(), &alpha, &beta, &gamma));
        std::printf("method=%s\nalpha=%.10g\nbeta=%.10g\ngamma=%.10g\nresidual=%.10g\nseed=%" PRIu64
                    "\n",
                    method.c_str(), alpha, beta, gamma, residual, seed);
        return 0;
    }

    if (ben->parsed()) {
        CHECK(fmr_benchmark(spec_path.c_str(), out_path.c_str()));
        return 0;
    }

    if (rot->parsed()) {
        fmr_image* in = nullptr;
        CHECK(fmr_image_read_pgm(input_path.c_str(), &in));
        auto input = own(in);
        fmr_mesh* m = nullptr;
        CHECK(fmr_mesh_from_rotation(input.get(), degrees, &m));
        auto mesh = own(m);
        CHECK(fmr_mesh_write(mesh.get(), out_path.c_str()));
        return 0;
    }

    return 2;  // unreachable: require_subcommand(1)
}
