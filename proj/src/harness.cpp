#include "fmr/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace fmr {

void ExperimentSpec::validate() const {
    if (phi < 2) throw std::invalid_argument("spec: phi must be >= 2");
    if (sample_ratios.empty()) throw std::invalid_argument("spec: no sample ratios");
    for (std::size_t i = 0; i < sample_ratios.size(); ++i) {
        double r = sample_ratios[i];
        if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("spec: ratios must lie in (0, 1]");
        if (i > 0 && r <= sample_ratios[i - 1])
            throw std::invalid_argument("spec: ratios must be strictly ascending");
    }
    if (methods.empty()) throw std::invalid_argument("spec: no methods");
    if (!(truncation_radius > 0.0)) throw std::invalid_argument("spec: truncation_radius must be > 0");
}

StrengthParams ExperimentSpec::params_for(InterpolationMethod m) const {
    auto it = params.find(m);
    return it != params.end() ? it->second : default_params(m);
}

Image make_reference(const Image& src, int phi) {
    if (phi < 2) throw std::invalid_argument("make_reference: phi must be >= 2");
    if (src.width() < phi || src.height() < phi)
        throw std::invalid_argument("make_reference: image smaller than phi");
    Image filtered = separable_lowpass(src, 1.0 / phi);
    Image ref(src.width() / phi, src.height() / phi);
    for (int i = 0; i < ref.height(); ++i)
        for (int j = 0; j < ref.width(); ++j) ref.at(i, j) = filtered.at(i * phi, j * phi);
    return ref;
}

FloatingMesh make_floating_mesh(const Image& filtered_src, int phi) {
    if (phi < 2) throw std::invalid_argument("make_floating_mesh: phi must be >= 2");
    if (filtered_src.width() < phi || filtered_src.height() < phi)
        throw std::invalid_argument("make_floating_mesh: image smaller than phi");
    std::vector<MeshSample> samples;
    samples.reserve(filtered_src.size());
    for (int r = 0; r < filtered_src.height(); ++r) {
        for (int c = 0; c < filtered_src.width(); ++c) {
            if (r % phi == 0 && c % phi == 0) continue;  // coarse lattice -> reference
            samples.push_back({static_cast<double>(c) / phi, static_cast<double>(r) / phi,
                               filtered_src.at(r, c)});
        }
    }
    return FloatingMesh(std::move(samples));
}

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& image_id, double ratio) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&](const char* s) {
        for (; *s; ++s) {
            h ^= static_cast<unsigned char>(*s);
            h *= 1099511628211ULL;
        }
    };
    mix(image_id.c_str());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "|%.0f", ratio * 1000.0);
    mix(buf);
    return base_seed ^ h;
}

std::vector<CorpusItem> load_corpus(const std::string& dir, int phi) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".pgm") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .pgm images in corpus dir: " + dir);

    std::vector<CorpusItem> corpus;
    for (const auto& f : files) {
        CorpusItem item;
        item.id = f.stem().string();
        Image src = read_pgm(f.string());
        Image filtered = separable_lowpass(src, 1.0 / phi);
        item.reference = Image(src.width() / phi, src.height() / phi);
        for (int i = 0; i < item.reference.height(); ++i)
            for (int j = 0; j < item.reference.width(); ++j)
                item.reference.at(i, j) = filtered.at(i * phi, j * phi);
        item.mesh = make_floating_mesh(filtered, phi);
        corpus.push_back(std::move(item));
    }
    return corpus;
}

double BenchmarkReport::mean_gain(const std::string& method, double ratio) const {
    double acc = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        if (r.failed || r.method != method || std::fabs(r.ratio - ratio) > 1e-9) continue;
        acc += r.gain;
        ++n;
    }
    if (n == 0) throw std::runtime_error("no benchmark rows for " + method);
    return acc / n;
}

void BenchmarkReport::write_csv(const std::string& path) const {
    fs::path tmp = fs::path(path);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write report: " + path);
        out << "image,method,ratio,psnr_initial_db,psnr_refined_db,gain_db,seed\n";
        char buf[256];
        for (const auto& r : rows) {
            if (r.failed) {
                std::snprintf(buf, sizeof(buf), "%s,%s,%.2f,nan,nan,nan,%llu\n", r.image.c_str(),
                              r.method.c_str(), r.ratio, static_cast<unsigned long long>(r.seed));
            } else {
                std::snprintf(buf, sizeof(buf), "%s,%s,%.2f,%.6f,%.6f,%.6f,%llu\n", r.image.c_str(),
                              r.method.c_str(), r.ratio, r.psnr_initial, r.psnr_refined, r.gain,
                              static_cast<unsigned long long>(r.seed));
            }
            out << buf;
        }
        if (!out) throw std::runtime_error("write failed: " + path);
    }
    fs::rename(tmp, path);
}

BenchmarkReport run_benchmark(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<CorpusItem> corpus = load_corpus(spec.corpus_dir, spec.phi);

    BenchmarkReport report;
    for (const auto& item : corpus) {
        std::uint64_t ref_pixels = static_cast<std::uint64_t>(item.reference.size());
        for (double ratio : spec.sample_ratios) {
            std::uint64_t seed = cell_seed(spec.seed, item.id, ratio);
            FloatingMesh sampled;
            try {
                sampled = sample_mesh(item.mesh, ratio, ref_pixels, seed);
            } catch (const std::exception& e) {
                for (auto m : spec.methods)
                    report.rows.push_back({item.id, method_name(m), ratio, 0, 0, 0, seed, true, e.what()});
                std::cerr << "bench: " << item.id << " ratio " << ratio << ": " << e.what() << "\n";
                continue;
            }
            for (auto m : spec.methods) {
                BenchmarkRow row{item.id, method_name(m), ratio, 0, 0, 0, seed, false, ""};
                try {
                    RefineRequest req;
                    req.mesh = sampled;
                    req.width = item.reference.width();
                    req.height = item.reference.height();
                    req.method = m;
                    req.params = spec.params_for(m);
                    req.denoiser = spec.denoiser;
                    req.truncation_radius = spec.truncation_radius;
                    req.bm3d = spec.bm3d;
                    RefineResult res = refine(req);
                    row.psnr_initial = psnr(item.reference, res.initial);
                    row.psnr_refined = psnr(item.reference, res.refined);
                    row.gain = row.psnr_refined - row.psnr_initial;
                } catch (const std::exception& e) {
                    row.failed = true;
                    row.message = e.what();
                    std::cerr << "bench: " << item.id << " " << method_name(m) << " ratio " << ratio
                              << ": " << e.what() << "\n";
                }
                report.rows.push_back(std::move(row));
            }
        }
    }
    std::sort(report.rows.begin(), report.rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
        if (a.image != b.image) return a.image < b.image;
        if (a.method != b.method) return a.method < b.method;
        return a.ratio < b.ratio;
    });
    return report;
}

std::vector<ErrorVsXiRow> error_vs_xi_study(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<CorpusItem> corpus = load_corpus(spec.corpus_dir, spec.phi);

    std::vector<ErrorVsXiRow> out;
    for (auto m : spec.methods) {
        std::vector<std::pair<double, double>> samples;  // (xi, squared error)
        for (const auto& item : corpus) {
            std::uint64_t ref_pixels = static_cast<std::uint64_t>(item.reference.size());
            for (double ratio : spec.sample_ratios) {
                FloatingMesh sampled =
                    sample_mesh(item.mesh, ratio, ref_pixels, cell_seed(spec.seed, item.id, ratio));
                Image initial =
                    reconstruct(sampled, item.reference.width(), item.reference.height(), m).image;
                XiField xi = compute_xi(sampled, item.reference.width(), item.reference.height(),
                                        spec.truncation_radius);
                for (std::size_t k = 0; k < xi.values.size(); ++k) {
                    double e = item.reference.data()[k] - initial.data()[k];
                    samples.emplace_back(xi.values[k], e * e);
                }
            }
        }
        std::vector<double> xis(samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) xis[k] = samples[k].first;
        std::sort(xis.begin(), xis.end());
        auto decile_of = [&](double x) {
            // quantile edges; last decile closed above
            int d = 0;
            while (d < 9 && x >= xis[std::min(xis.size() - 1, (d + 1) * xis.size() / 10)]) ++d;
            return d;
        };
        double eps_sum[10] = {0}, xi_sum[10] = {0};
        long long pop[10] = {0};
        for (const auto& [x, e] : samples) {
            int d = decile_of(x);
            eps_sum[d] += e;
            xi_sum[d] += x;
            pop[d] += 1;
        }
        for (int d = 0; d < 10; ++d) {
            ErrorVsXiRow row;
            row.method = method_name(m);
            row.decile = d;
            row.population = pop[d];
            if (pop[d] > 0) {
                row.mean_xi = xi_sum[d] / pop[d];
                row.mean_eps = eps_sum[d] / pop[d];
            }
            out.push_back(row);
        }
    }
    return out;
}

std::vector<FixedVsAdaptiveRow> fixed_vs_adaptive_study(const ExperimentSpec& spec,
                                                        const std::vector<double>& fixed_sigma_grid) {
    spec.validate();
    std::vector<CorpusItem> corpus = load_corpus(spec.corpus_dir, spec.phi);
    InterpolationMethod m = spec.methods.front();
    StrengthParams params = spec.params_for(m);

    std::vector<FixedVsAdaptiveRow> out;
    for (double ratio : spec.sample_ratios) {
        FixedVsAdaptiveRow row;
        row.ratio = ratio;
        row.fixed_gain.assign(fixed_sigma_grid.size(), 0.0);
        double adaptive_acc = 0.0;
        for (const auto& item : corpus) {
            std::uint64_t ref_pixels = static_cast<std::uint64_t>(item.reference.size());
            FloatingMesh sampled =
                sample_mesh(item.mesh, ratio, ref_pixels, cell_seed(spec.seed, item.id, ratio));
            int w = item.reference.width(), h = item.reference.height();
            Image initial = reconstruct(sampled, w, h, m).image;
            double p0 = psnr(item.reference, initial);

            XiField xi = compute_xi(sampled, w, h, spec.truncation_radius);
            Image adaptive = denoise_adaptive(initial, strength_map_from_xi(xi, params),
                                              spec.denoiser, spec.bm3d);
            adaptive_acc += psnr(item.reference, adaptive) - p0;

            for (std::size_t s = 0; s < fixed_sigma_grid.size(); ++s) {
                Image den = denoise_adaptive(initial, uniform_strength(w, h, fixed_sigma_grid[s]),
                                             spec.denoiser, spec.bm3d);
                row.fixed_gain[s] += psnr(item.reference, den) - p0;
            }
        }
        double n = static_cast<double>(corpus.size());
        row.adaptive_gain = adaptive_acc / n;
        for (double& g : row.fixed_gain) g /= n;
        out.push_back(row);
    }
    return out;
}

namespace {

std::map<std::string, std::string> read_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (...) {
        throw std::runtime_error("bad numeric value for " + key + ": '" + s + "'");
    }
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
}

}  // namespace

StrengthParams read_params(const std::string& path) {
    auto kv = read_kv(path);
    StrengthParams p;
    if (!kv.count("alpha") || !kv.count("beta") || !kv.count("gamma"))
        throw std::runtime_error(path + ": params file needs alpha, beta, gamma");
    p.alpha = to_double(kv["alpha"], "alpha");
    p.beta = to_double(kv["beta"], "beta");
    p.gamma = to_double(kv["gamma"], "gamma");
    if (kv.count("method")) p.method = method_from_string(kv["method"]);
    p.validate();
    return p;
}

void write_params(const StrengthParams& params, DenoiserKind denoiser, double residual,
                  const std::string& path) {
    fs::path tmp = fs::path(path);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write params: " + path);
        char buf[256];
        std::snprintf(buf, sizeof(buf), "method=%s\nalpha=%.10g\nbeta=%.10g\ngamma=%.10g\ndenoiser=%s\nresidual=%.10g\n",
                      method_name(params.method).c_str(), params.alpha, params.beta, params.gamma,
                      denoiser_name(denoiser).c_str(), residual);
        out << buf;
        if (!out) throw std::runtime_error("write failed: " + path);
    }
    fs::rename(tmp, path);
}

ExperimentSpec read_spec(const std::string& path) {
    auto kv = read_kv(path);
    ExperimentSpec spec;
    if (!kv.count("corpus_dir")) throw std::runtime_error(path + ": corpus_dir missing");
    spec.corpus_dir = kv["corpus_dir"];
    if (kv.count("phi")) spec.phi = static_cast<int>(to_double(kv["phi"], "phi"));
    if (!kv.count("ratios")) throw std::runtime_error(path + ": ratios missing");
    for (const auto& tok : split_list(kv["ratios"])) spec.sample_ratios.push_back(to_double(tok, "ratios"));
    if (!kv.count("methods")) throw std::runtime_error(path + ": methods missing");
    for (const auto& tok : split_list(kv["methods"])) spec.methods.push_back(method_from_string(tok));
    if (kv.count("denoiser")) spec.denoiser = denoiser_from_string(kv["denoiser"]);
    if (kv.count("seed")) spec.seed = std::stoull(kv["seed"]);
    if (kv.count("truncation_radius"))
        spec.truncation_radius = to_double(kv["truncation_radius"], "truncation_radius");
    for (auto m : {InterpolationMethod::NN, InterpolationMethod::LI, InterpolationMethod::CI,
                   InterpolationMethod::NI}) {
        std::string key = "params_" + std::string(m == InterpolationMethod::NN   ? "nn"
                                                  : m == InterpolationMethod::LI ? "li"
                                                  : m == InterpolationMethod::CI ? "ci"
                                                                                 : "ni");
        if (kv.count(key)) {
            StrengthParams p = read_params(kv[key]);
            p.method = m;
            spec.params[m] = p;
        }
    }
    spec.validate();
    return spec;
}

}  // namespace fmr
