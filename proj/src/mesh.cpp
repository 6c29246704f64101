#include "fmr/mesh.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_set>

namespace fmr {

namespace {

struct PosKey {
    std::uint64_t x_bits, y_bits;
    bool operator==(const PosKey&) const = default;
};

struct PosKeyHash {
    std::size_t operator()(const PosKey& k) const {
        std::uint64_t h = k.x_bits * 0x9e3779b97f4a7c15ULL;
        h ^= k.y_bits + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

PosKey key_of(double x, double y) {
    PosKey k;
    std::memcpy(&k.x_bits, &x, sizeof(double));
    std::memcpy(&k.y_bits, &y, sizeof(double));
    return k;
}

}  // namespace

FloatingMesh::FloatingMesh(std::vector<MeshSample> samples) : samples_(std::move(samples)) {
    std::unordered_set<PosKey, PosKeyHash> seen;
    seen.reserve(samples_.size() * 2);
    bool first = true;
    for (const auto& s : samples_) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.value))
            throw std::invalid_argument("mesh sample with non-finite component");
        if (!seen.insert(key_of(s.x, s.y)).second) {
            std::ostringstream os;
            os << "duplicate mesh sample position (" << s.x << ", " << s.y << ")";
            throw std::invalid_argument(os.str());
        }
        if (first) {
            bounds_ = {s.x, s.y, s.x, s.y};
            first = false;
        } else {
            bounds_.min_x = std::min(bounds_.min_x, s.x);
            bounds_.min_y = std::min(bounds_.min_y, s.y);
            bounds_.max_x = std::max(bounds_.max_x, s.x);
            bounds_.max_y = std::max(bounds_.max_y, s.y);
        }
    }
}

FloatingMesh mesh_from_rotation(const Image& img, double degrees) {
    double rad = degrees * std::numbers::pi / 180.0;
    double cs = std::cos(rad), sn = std::sin(rad);
    double cx = (img.width() - 1) / 2.0;
    double cy = (img.height() - 1) / 2.0;
    std::vector<MeshSample> out;
    out.reserve(img.size());
    for (int i = 0; i < img.height(); ++i) {
        for (int j = 0; j < img.width(); ++j) {
            double dx = j - cx, dy = i - cy;
            out.push_back({cx + cs * dx - sn * dy, cy + sn * dx + cs * dy, img.at(i, j)});
        }
    }
    return FloatingMesh(std::move(out));
}

FloatingMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty mesh file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y,value")
        throw std::runtime_error(path + ": expected header 'x,y,value', got '" + line + "'");

    std::vector<MeshSample> samples;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        MeshSample s;
        double* fields[3] = {&s.x, &s.y, &s.value};
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int f = 0; f < 3; ++f) {
            auto [next, ec] = std::from_chars(p, end, *fields[f]);
            bool last = (f == 2);
            bool sep_ok = last ? (next == end) : (next < end && *next == ',');
            if (ec != std::errc() || !sep_ok) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": malformed mesh row '" + line + "'");
            }
            p = next + (last ? 0 : 1);
        }
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.value))
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-finite value");
        samples.push_back(s);
    }
    try {
        return FloatingMesh(std::move(samples));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

namespace {

void print_num(std::ostream& out, double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.write(buf, p - buf);
}

}  // namespace

void write_mesh(const FloatingMesh& mesh, const std::string& path) {
    std::filesystem::path tmp = std::filesystem::path(path);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write mesh file: " + path);
        out << "x,y,value\n";
        for (const auto& s : mesh.samples()) {
            print_num(out, s.x);
            out << ',';
            print_num(out, s.y);
            out << ',';
            print_num(out, s.value);
            out << '\n';
        }
        if (!out) throw std::runtime_error("write failed: " + path);
    }
    std::filesystem::rename(tmp, path);
}

namespace {

// unbiased bounded draw; stable across standard libraries
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

}  // namespace

FloatingMesh sample_mesh(const FloatingMesh& mesh, double ratio,
                         std::uint64_t ref_pixel_count, std::uint64_t seed) {
    if (!(ratio > 0.0) || ratio > 1.0)
        throw std::invalid_argument("sample ratio must be in (0, 1]");
    std::uint64_t count = static_cast<std::uint64_t>(std::llround(ratio * static_cast<double>(ref_pixel_count)));
    if (count > mesh.size())
        throw std::invalid_argument("requested " + std::to_string(count) + " samples but mesh has " +
                                    std::to_string(mesh.size()));
    std::vector<MeshSample> pool = mesh.samples();
    std::mt19937_64 rng(seed);
    std::vector<MeshSample> out;
    out.reserve(count);
    std::uint64_t n = pool.size();
    for (std::uint64_t k = 0; k < count; ++k) {
        std::uint64_t pick = k + bounded(rng, n - k);
        std::swap(pool[k], pool[pick]);
        out.push_back(pool[k]);
    }
    return FloatingMesh(std::move(out));
}

}  // namespace fmr
