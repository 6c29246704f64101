#include "fmr/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fmr/parallel.hpp"
#include "fmr/predicates.hpp"

namespace fmr {

InterpolationMethod method_from_string(const std::string& s) {
    if (s == "nn" || s == "NN") return InterpolationMethod::NN;
    if (s == "li" || s == "LI") return InterpolationMethod::LI;
    if (s == "ci" || s == "CI") return InterpolationMethod::CI;
    if (s == "ni" || s == "NI") return InterpolationMethod::NI;
    throw std::invalid_argument("unknown interpolation method: " + s);
}

std::string method_name(InterpolationMethod m) {
    switch (m) {
        case InterpolationMethod::NN: return "NN";
        case InterpolationMethod::LI: return "LI";
        case InterpolationMethod::CI: return "CI";
        case InterpolationMethod::NI: return "NI";
    }
    return "?";
}

namespace {

inline int mod3(int k) { return k % 3; }

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline Vec2 sub(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

Vec2 circumcenter3(Vec2 a, Vec2 b, Vec2 c) {
    double bx = b.x - a.x, by = b.y - a.y;
    double cx = c.x - a.x, cy = c.y - a.y;
    double d = 2.0 * (bx * cy - by * cx);
    double b2 = bx * bx + by * by;
    double c2 = cx * cx + cy * cy;
    return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

// gradients of the three barycentric coordinate functions of (p1,p2,p3)
void bary_gradients(Vec2 p1, Vec2 p2, Vec2 p3, Vec2 g[3]) {
    double a2 = cross(sub(p2, p1), sub(p3, p1));
    g[0] = {(p2.y - p3.y) / a2, (p3.x - p2.x) / a2};
    g[1] = {(p3.y - p1.y) / a2, (p1.x - p3.x) / a2};
    g[2] = {(p1.y - p2.y) / a2, (p2.x - p1.x) / a2};
}

// cubic Bernstein-Bezier evaluation, coefficient order
// [b300,b030,b003,b210,b120,b201,b021,b111,b102,b012]
double bb_eval(const double* b, double u, double v, double w) {
    return b[0] * u * u * u + b[1] * v * v * v + b[2] * w * w * w +
           3.0 * (b[3] * u * u * v + b[4] * u * v * v + b[5] * u * u * w + b[6] * v * v * w +
                  b[8] * u * w * w + b[9] * v * w * w) +
           6.0 * b[7] * u * v * w;
}

// middle Bezier coefficient of one mini triangle, chosen so the derivative
// across the outer macro edge varies linearly along it (reduced
// Hsieh-Clough-Tocher condition, which makes neighbouring macro triangles C1)
double ct_b111(Vec2 pa, Vec2 pb, Vec2 pc, double b300, double b030, double b210, double b120,
               double b201, double b021) {
    Vec2 g[3];
    bary_gradients(pa, pb, pc, g);
    Vec2 e = sub(pb, pa);
    Vec2 nrm{-e.y, e.x};
    if (dot(nrm, sub(pc, pa)) < 0) nrm = {-nrm.x, -nrm.y};
    double d1 = dot(g[0], nrm), d2 = dot(g[1], nrm), d3 = dot(g[2], nrm);
    double q0 = d1 * b300 + d2 * b210 + d3 * b201;
    double qe = d1 * b120 + d2 * b030 + d3 * b021;
    return ((q0 + qe) / 2.0 - d1 * b210 - d2 * b120) / d3;
}

}  // namespace

Interpolator::Interpolator(const Triangulation& tri, InterpolationMethod method)
    : tri_(tri), method_(method) {
    grid_ = std::make_unique<PointGrid>(tri.positions(), 1.0);
    if (method != InterpolationMethod::CI) return;

    const auto& pos = tri.positions();
    const auto& val = tri.values();
    std::size_t n = pos.size();

    // 1-ring neighborhoods
    std::vector<std::vector<int>> ring(n);
    auto add_edge = [&](int a, int b) {
        auto& r = ring[a];
        if (std::find(r.begin(), r.end(), b) == r.end()) r.push_back(b);
    };
    for (const auto& t : tri.triangles()) {
        for (int k = 0; k < 3; ++k) {
            add_edge(t.v[k], t.v[mod3(k + 1)]);
            add_edge(t.v[mod3(k + 1)], t.v[k]);
        }
    }

    gradients_.assign(n, Vec2{0, 0});
    auto fit = [&](int v, const std::vector<int>& nbrs, Vec2& out) -> bool {
        double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
        for (int u : nbrs) {
            double dx = pos[u].x - pos[v].x, dy = pos[u].y - pos[v].y;
            double d2 = dx * dx + dy * dy;
            if (d2 <= 0) continue;
            double w = 1.0 / d2;
            double df = val[u] - val[v];
            a11 += w * dx * dx;
            a12 += w * dx * dy;
            a22 += w * dy * dy;
            r1 += w * dx * df;
            r2 += w * dy * df;
        }
        double det = a11 * a22 - a12 * a12;
        if (!(det > 1e-10 * std::max(a11 * a22, 1e-300))) return false;
        out = {(a22 * r1 - a12 * r2) / det, (a11 * r2 - a12 * r1) / det};
        return true;
    };
    for (std::size_t v = 0; v < n; ++v) {
        bool ok = ring[v].size() >= 3 && fit(static_cast<int>(v), ring[v], gradients_[v]);
        if (!ok) {
            // under-determined near the hull: pad with the second ring
            std::vector<int> ext = ring[v];
            for (int u : ring[v])
                for (int w : ring[u])
                    if (w != static_cast<int>(v) &&
                        std::find(ext.begin(), ext.end(), w) == ext.end())
                        ext.push_back(w);
            if (!fit(static_cast<int>(v), ext, gradients_[v])) gradients_[v] = {0, 0};
        }
    }

    // Bezier control net per macro triangle
    ct_.resize(tri.triangles().size());
    parallel_for(tri.triangles().size(), [&](std::size_t t0, std::size_t t1) {
        for (std::size_t t = t0; t < t1; ++t) {
            const Triangle& T = tri.triangles()[t];
            Vec2 P[3] = {pos[T.v[0]], pos[T.v[1]], pos[T.v[2]]};
            double F[3] = {val[T.v[0]], val[T.v[1]], val[T.v[2]]};
            Vec2 G[3] = {gradients_[T.v[0]], gradients_[T.v[1]], gradients_[T.v[2]]};
            Vec2 Pc{(P[0].x + P[1].x + P[2].x) / 3.0, (P[0].y + P[1].y + P[2].y) / 3.0};

            double q[3], eout[3][2], b111[3];
            for (int i = 0; i < 3; ++i) q[i] = F[i] + dot(G[i], sub(Pc, P[i])) / 3.0;
            for (int i = 0; i < 3; ++i) {
                int jn = mod3(i + 1);
                eout[i][0] = F[i] + dot(G[i], sub(P[jn], P[i])) / 3.0;   // b210 of mini i
                eout[i][1] = F[jn] + dot(G[jn], sub(P[i], P[jn])) / 3.0; // b120 of mini i
                b111[i] = ct_b111(P[i], P[jn], Pc, F[i], F[jn], eout[i][0], eout[i][1], q[i], q[jn]);
            }
            // s[i]: control point on the internal edge Vi-Vc, shared by the
            // two minis meeting there
            double s[3];
            for (int i = 0; i < 3; ++i) {
                int prev = mod3(i + 2);
                s[i] = (b111[prev] + b111[i] + q[i]) / 3.0;
            }
            double c = (s[0] + s[1] + s[2]) / 3.0;
            for (int i = 0; i < 3; ++i) {
                int jn = mod3(i + 1);
                double* b = ct_[t].data() + 10 * i;
                b[0] = F[i];         // b300
                b[1] = F[jn];        // b030
                b[2] = c;            // b003
                b[3] = eout[i][0];   // b210
                b[4] = eout[i][1];   // b120
                b[5] = q[i];         // b201
                b[6] = q[jn];        // b021
                b[7] = b111[i];      // b111
                b[8] = s[i];         // b102
                b[9] = s[jn];        // b012
            }
        }
    });
}

double Interpolator::nearest_value(Vec2 q) const {
    int idx = grid_->nearest(q);
    return tri_.values()[idx];
}

double Interpolator::linear_at(int t, Vec2 q) const {
    const Triangle& T = tri_.triangles()[t];
    Vec2 a = tri_.positions()[T.v[0]], b = tri_.positions()[T.v[1]], c = tri_.positions()[T.v[2]];
    double a2 = cross(sub(b, a), sub(c, a));
    double l0 = cross(sub(b, q), sub(c, q)) / a2;
    double l1 = cross(sub(c, q), sub(a, q)) / a2;
    double l2 = 1.0 - l0 - l1;
    return l0 * tri_.values()[T.v[0]] + l1 * tri_.values()[T.v[1]] + l2 * tri_.values()[T.v[2]];
}

double Interpolator::cubic_at(int t, Vec2 q) const {
    const Triangle& T = tri_.triangles()[t];
    Vec2 a = tri_.positions()[T.v[0]], b = tri_.positions()[T.v[1]], c = tri_.positions()[T.v[2]];
    double a2 = cross(sub(b, a), sub(c, a));
    double l[3];
    l[0] = cross(sub(b, q), sub(c, q)) / a2;
    l[1] = cross(sub(c, q), sub(a, q)) / a2;
    l[2] = 1.0 - l[0] - l[1];
    // mini i spans the region nearest the outer edge (Vi, Vi+1), where the
    // barycentric of the opposite vertex is smallest
    int opp = 0;
    if (l[1] < l[opp]) opp = 1;
    if (l[2] < l[opp]) opp = 2;
    int i = mod3(opp + 1);  // mini opposite vertex `opp` has corners (Vi, Vi+1, Vc)
    double w = 3.0 * l[opp];
    double u = l[i] - l[opp];
    double v = l[mod3(i + 1)] - l[opp];
    return bb_eval(ct_[t].data() + 10 * i, u, v, w);
}

std::vector<std::pair<int, double>> Interpolator::sibson_weights(Vec2 q, int& hint) const {
    std::vector<std::pair<int, double>> out;
    int t0 = tri_.locate(q, hint);
    if (t0 == kOutside) return out;

    const auto& pos = tri_.positions();
    const auto& tris = tri_.triangles();

    // coincident with a vertex
    for (int k = 0; k < 3; ++k) {
        Vec2 p = pos[tris[t0].v[k]];
        double dx = p.x - q.x, dy = p.y - q.y;
        if (dx * dx + dy * dy < 1e-18) {
            out.emplace_back(tris[t0].v[k], 1.0);
            return out;
        }
    }

    // cavity: triangles whose circumcircle strictly contains q
    thread_local std::vector<int> stamp;
    thread_local int generation = 0;
    if (stamp.size() < tris.size()) stamp.assign(tris.size(), 0);
    int gen = ++generation;

    auto in_circle = [&](int t) {
        const Triangle& T = tris[t];
        return incircle(pos[T.v[0]].x, pos[T.v[0]].y, pos[T.v[1]].x, pos[T.v[1]].y,
                        pos[T.v[2]].x, pos[T.v[2]].y, q.x, q.y) > 0;
    };

    std::vector<int> cavity;
    std::vector<int> queue{t0};
    stamp[t0] = gen;
    while (!queue.empty()) {
        int t = queue.back();
        queue.pop_back();
        cavity.push_back(t);
        for (int k = 0; k < 3; ++k) {
            int nb = tris[t].n[k];
            if (nb >= 0 && stamp[nb] != gen && in_circle(nb)) {
                stamp[nb] = gen;
                queue.push_back(nb);
            }
        }
    }
    auto in_cavity = [&](int t) { return t >= 0 && stamp[t] == gen; };

    // directed cavity boundary edges a->b with their interior triangle
    std::unordered_map<int, std::pair<int, int>> boundary;  // a -> (b, tri)
    for (int t : cavity) {
        for (int k = 0; k < 3; ++k) {
            int nb = tris[t].n[k];
            if (!in_cavity(nb))
                boundary[tris[t].v[mod3(k + 1)]] = {tris[t].v[mod3(k + 2)], t};
        }
    }
    if (boundary.empty()) return out;

    // walk the boundary cycle; every boundary vertex is a natural neighbor
    std::vector<Vec2> poly;
    double total = 0.0;
    int start = boundary.begin()->first;
    int u = start;
    std::size_t guard = 0;
    do {
        auto [v, t_uv] = boundary.at(u);
        int w = boundary.at(v).first;

        poly.clear();
        poly.push_back(circumcenter3(q, pos[u], pos[v]));
        // old cavity triangles around v, from edge (u,v) toward edge (v,w)
        int t = t_uv, prev = u;
        std::size_t rot_guard = 0;
        while (true) {
            poly.push_back(tri_.circumcenter(t));
            const Triangle& T = tris[t];
            int third = -1;
            for (int k = 0; k < 3; ++k)
                if (T.v[k] != v && T.v[k] != prev) third = T.v[k];
            int iprev = 0;
            while (T.v[iprev] != prev) ++iprev;
            int nb = T.n[iprev];  // across edge (v, third)
            if (!in_cavity(nb)) break;
            t = nb;
            prev = third;
            if (++rot_guard > tris.size()) throw std::runtime_error("sibson: cavity rotation failed");
        }
        poly.push_back(circumcenter3(q, pos[v], pos[w]));

        double area = 0.0;
        for (std::size_t k = 0; k + 1 < poly.size(); ++k)
            area += cross(poly[k], poly[k + 1]);
        area += cross(poly.back(), poly.front());
        area = std::fabs(area) / 2.0;
        out.emplace_back(v, area);
        total += area;

        u = v;
        if (++guard > boundary.size() + 1) throw std::runtime_error("sibson: boundary walk failed");
    } while (u != start);

    if (!(total > 0.0) || !std::isfinite(total)) {
        // degenerate cavity (q on a hull edge puts a circumcenter at
        // infinity); the Sibson limit there is linear along the edge, which
        // barycentric weights in the containing triangle reproduce
        out.clear();
        const Triangle& T = tris[t0];
        Vec2 a = pos[T.v[0]], b = pos[T.v[1]], c = pos[T.v[2]];
        double a2 = cross(sub(b, a), sub(c, a));
        out.emplace_back(T.v[0], cross(sub(b, q), sub(c, q)) / a2);
        out.emplace_back(T.v[1], cross(sub(c, q), sub(a, q)) / a2);
        out.emplace_back(T.v[2], 1.0 - out[0].second - out[1].second);
        return out;
    }
    for (auto& [v, wgt] : out) wgt /= total;
    return out;
}

std::optional<double> Interpolator::evaluate(Vec2 q, int& hint) const {
    if (method_ == InterpolationMethod::NN) return nearest_value(q);
    int t = tri_.locate(q, hint);
    if (t == kOutside) return std::nullopt;
    switch (method_) {
        case InterpolationMethod::LI: return linear_at(t, q);
        case InterpolationMethod::CI: return cubic_at(t, q);
        case InterpolationMethod::NI: {
            auto w = sibson_weights(q, hint);
            if (w.empty()) return std::nullopt;
            double acc = 0.0;
            for (const auto& [v, wgt] : w) acc += wgt * tri_.values()[v];
            return acc;
        }
        default: return std::nullopt;
    }
}

ReconstructResult reconstruct(const FloatingMesh& mesh, int width, int height,
                              InterpolationMethod method) {
    if (width < 1 || height < 1) throw std::invalid_argument("reconstruct: dimensions must be >= 1");
    Triangulation tri = build_delaunay(mesh);
    Interpolator interp(tri, method);

    ReconstructResult res;
    res.image = Image(width, height);
    res.exterior_mask.assign(static_cast<std::size_t>(width) * height, 0);

    parallel_for(height, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t r = r0; r < r1; ++r) {
            // row-local hint chain: results stay independent of how rows are
            // split across workers
            int hint = 0;
            for (int c = 0; c < width; ++c) {
                Vec2 q{static_cast<double>(c), static_cast<double>(r)};
                auto v = interp.evaluate(q, hint);
                std::size_t k = r * width + c;
                if (v) {
                    res.image.data()[k] = *v;
                } else {
                    res.image.data()[k] = interp.nearest_value(q);
                    res.exterior_mask[k] = 1;
                }
            }
        }
    });
    return res;
}

}  // namespace fmr
