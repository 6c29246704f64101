#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "fmr/harness.hpp"

namespace fs = std::filesystem;
using fmr::ExperimentSpec;
using fmr::FloatingMesh;
using fmr::Image;
using fmr::InterpolationMethod;

namespace {

Image synthetic_image(int w, int h, int variant) {
    Image img(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double v = 128.0 + 55.0 * std::sin(0.05 * c + variant) * std::cos(0.07 * r) +
                       30.0 * std::sin(0.11 * (c + r) + 2 * variant);
            img.at(r, c) = std::clamp(v, 0.0, 255.0);
        }
    return img;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directory(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("reference decimation invariant") {
    Image src = synthetic_image(83, 67, 1);  // not a multiple of phi on purpose
    int phi = 5;
    Image ref = fmr::make_reference(src, phi);
    CHECK(ref.width() == 16);
    CHECK(ref.height() == 13);
    Image filtered = fmr::separable_lowpass(src, 1.0 / phi);
    for (int i = 0; i < ref.height(); ++i)
        for (int j = 0; j < ref.width(); ++j)
            CHECK(ref.at(i, j) == filtered.at(i * phi, j * phi));  // exact
}

TEST_CASE("floating mesh construction from the fine grid") {
    Image src = synthetic_image(20, 15, 2);
    int phi = 5;
    Image filtered = fmr::separable_lowpass(src, 1.0 / phi);
    FloatingMesh mesh = fmr::make_floating_mesh(filtered, phi);

    // excluded: pixels with both coordinates on the coarse lattice (4 x 3)
    CHECK(mesh.size() == 20 * 15 - 4 * 3);
    for (const auto& s : mesh.samples()) {
        double sx = s.x * phi, sy = s.y * phi;  // back to fine-grid integers
        CHECK(sx == doctest::Approx(std::round(sx)).epsilon(1e-12));
        CHECK(sy == doctest::Approx(std::round(sy)).epsilon(1e-12));
        bool both_integral =
            std::round(s.x) == s.x && std::round(s.y) == s.y;
        CHECK(!both_integral);
        int c = static_cast<int>(std::lround(sx)), r = static_cast<int>(std::lround(sy));
        CHECK(s.value == filtered.at(r, c));
    }
}

TEST_CASE("cell seeds separate images and ratios") {
    std::set<std::uint64_t> seen;
    for (const char* id : {"a", "b", "c"})
        for (double ratio : {0.2, 0.3, 0.4}) seen.insert(fmr::cell_seed(42, id, ratio));
    CHECK(seen.size() == 9);
    CHECK(fmr::cell_seed(42, "a", 0.2) == fmr::cell_seed(42, "a", 0.2));  // stable
    CHECK(fmr::cell_seed(42, "a", 0.2) != fmr::cell_seed(43, "a", 0.2));
}

TEST_CASE("spec and params files") {
    TempDir dir("fmr_test_spec");
    std::string params_path = (dir.path / "ci.kv").string();
    fmr::StrengthParams p{50.5, -1.25, 0.33, InterpolationMethod::CI};
    fmr::write_params(p, fmr::DenoiserKind::BLEND, 0.125, params_path);
    fmr::StrengthParams back = fmr::read_params(params_path);
    CHECK(back.alpha == doctest::Approx(p.alpha).epsilon(1e-9));
    CHECK(back.beta == doctest::Approx(p.beta).epsilon(1e-9));
    CHECK(back.gamma == doctest::Approx(p.gamma).epsilon(1e-9));
    CHECK(back.method == InterpolationMethod::CI);

    std::string spec_path = (dir.path / "spec.kv").string();
    std::ofstream(spec_path) << "# comment\n"
                             << "corpus_dir=" << dir.path.string() << "\n"
                             << "phi=5\nratios=0.2,0.4\nmethods=li,ci\ndenoiser=blend\nseed=9\n"
                             << "truncation_radius=20\nparams_ci=" << params_path << "\n";
    ExperimentSpec spec = fmr::read_spec(spec_path);
    CHECK(spec.phi == 5);
    CHECK(spec.sample_ratios == std::vector<double>{0.2, 0.4});
    CHECK(spec.methods == std::vector<InterpolationMethod>{InterpolationMethod::LI,
                                                           InterpolationMethod::CI});
    CHECK(spec.denoiser == fmr::DenoiserKind::BLEND);
    CHECK(spec.seed == 9);
    CHECK(spec.truncation_radius == 20.0);
    CHECK(spec.params_for(InterpolationMethod::CI).alpha == doctest::Approx(50.5).epsilon(1e-9));
    // methods without a file fall back to the shipped defaults
    CHECK(spec.params_for(InterpolationMethod::LI).alpha == doctest::Approx(73.69));

    std::ofstream(spec_path) << "phi=5\n";  // corpus_dir missing
    CHECK_THROWS(fmr::read_spec(spec_path));
    std::ofstream(spec_path) << "corpus_dir=x\nratios=0.4,0.2\nmethods=ci\n";  // not ascending
    CHECK_THROWS(fmr::read_spec(spec_path));
}

TEST_CASE("benchmark runs and reports deterministically") {
    TempDir dir("fmr_test_bench");
    for (int i = 0; i < 2; ++i)
        fmr::write_pgm(synthetic_image(110, 110, i), (dir.path / ("img" + std::to_string(i) + ".pgm")).string());

    ExperimentSpec spec;
    spec.corpus_dir = dir.path.string();
    spec.phi = 5;
    spec.sample_ratios = {0.3, 0.6};
    spec.methods = {InterpolationMethod::LI, InterpolationMethod::NN};
    spec.denoiser = fmr::DenoiserKind::BLEND;
    spec.seed = 11;

    fmr::BenchmarkReport report = fmr::run_benchmark(spec);
    REQUIRE(report.rows.size() == 2 * 2 * 2);

    // sorted by (image, method, ratio), one seed per (image, ratio) cell
    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto &a = report.rows[i - 1], &b = report.rows[i];
        CHECK(std::tie(a.image, a.method, a.ratio) < std::tie(b.image, b.method, b.ratio));
    }
    for (const auto& row : report.rows) {
        CHECK(!row.failed);
        CHECK(row.seed == fmr::cell_seed(11, row.image, row.ratio));
        CHECK(row.gain == doctest::Approx(row.psnr_refined - row.psnr_initial).epsilon(1e-12));
    }

    std::string csv_path = (dir.path / "report.csv").string();
    report.write_csv(csv_path);
    std::ifstream in(csv_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "image,method,ratio,psnr_initial_db,psnr_refined_db,gain_db,seed");
    int lines = 0;
    for (std::string line; std::getline(in, line);) {
        ++lines;
        CHECK(std::count(line.begin(), line.end(), ',') == 6);
    }
    CHECK(lines == 8);

    // byte-identical across runs
    fmr::BenchmarkReport again = fmr::run_benchmark(spec);
    std::string csv2 = (dir.path / "report2.csv").string();
    again.write_csv(csv2);
    std::stringstream s1, s2;
    s1 << std::ifstream(csv_path).rdbuf();
    s2 << std::ifstream(csv2).rdbuf();
    CHECK(s1.str() == s2.str());

    CHECK(report.mean_gain("LI", 0.3) ==
          doctest::Approx((report.rows[0].gain + report.rows[4].gain) / 2).epsilon(1e-12));
    CHECK_THROWS(report.mean_gain("CI", 0.3));
}

TEST_CASE("corpus loading requires images") {
    TempDir dir("fmr_test_empty_corpus");
    CHECK_THROWS(fmr::load_corpus(dir.path.string(), 5));
    CHECK_THROWS(fmr::load_corpus((dir.path / "missing").string(), 5));
}
