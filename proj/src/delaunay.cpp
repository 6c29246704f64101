#include "fmr/delaunay.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "fmr/predicates.hpp"

namespace fmr {

namespace {

inline int mod3(int k) { return k % 3; }

struct Builder {
    const std::vector<Vec2>& pts;
    std::vector<Triangle> tris;
    std::vector<char> alive;
    int hint = 0;
    std::vector<std::pair<int, int>> legal_stack;  // (triangle, index of the just-inserted vertex)

    explicit Builder(const std::vector<Vec2>& p) : pts(p) {}

    int orient(int a, int b, Vec2 q) const {
        return orient2d(pts[a].x, pts[a].y, pts[b].x, pts[b].y, q.x, q.y);
    }

    int alloc(const Triangle& t) {
        tris.push_back(t);
        alive.push_back(1);
        return static_cast<int>(tris.size()) - 1;
    }

    void set_backpointer(int tri, int old_nb, int new_nb) {
        if (tri < 0) return;
        for (int k = 0; k < 3; ++k) {
            if (tris[tri].n[k] == old_nb) {
                tris[tri].n[k] = new_nb;
                return;
            }
        }
        assert(false && "missing adjacency backpointer");
    }

    // Containing triangle (closed), or -1 when q is strictly outside the hull.
    int walk(Vec2 q, int start) const {
        int t = start;
        if (t < 0 || t >= static_cast<int>(tris.size()) || !alive[t]) t = first_alive();
        std::size_t steps = 0, cap = 4 * tris.size() + 16;
        while (true) {
            if (++steps > cap) return exhaustive(q);
            bool moved = false;
            for (int k = 0; k < 3; ++k) {
                int a = tris[t].v[mod3(k + 1)];
                int b = tris[t].v[mod3(k + 2)];
                if (orient(a, b, q) < 0) {
                    int nb = tris[t].n[k];
                    if (nb < 0) return -1;  // right of a hull edge
                    t = nb;
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
        }
    }

    int first_alive() const {
        for (std::size_t i = 0; i < tris.size(); ++i)
            if (alive[i]) return static_cast<int>(i);
        return -1;
    }

    int exhaustive(Vec2 q) const {
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!alive[t]) continue;
            bool inside = true;
            for (int k = 0; k < 3 && inside; ++k)
                inside = orient(tris[t].v[mod3(k + 1)], tris[t].v[mod3(k + 2)], q) >= 0;
            if (inside) return static_cast<int>(t);
        }
        return -1;
    }

    void flip(int t_idx, int k) {
        Triangle t = tris[t_idx];
        int nb_idx = t.n[k];
        Triangle nb = tris[nb_idx];
        int p = t.v[k], a = t.v[mod3(k + 1)], b = t.v[mod3(k + 2)];
        int m = 0;
        while (nb.n[m] != t_idx) ++m;
        int q = nb.v[m];
        assert(nb.v[mod3(m + 1)] == b && nb.v[mod3(m + 2)] == a);

        int t_pa = t.n[mod3(k + 2)];
        int t_bp = t.n[mod3(k + 1)];
        int n_aq = nb.n[mod3(m + 1)];
        int n_qb = nb.n[mod3(m + 2)];

        tris[t_idx] = Triangle{{p, a, q}, {n_aq, nb_idx, t_pa}};
        tris[nb_idx] = Triangle{{p, q, b}, {n_qb, t_bp, t_idx}};
        set_backpointer(n_aq, nb_idx, t_idx);
        set_backpointer(t_bp, t_idx, nb_idx);
    }

    void legalize() {
        while (!legal_stack.empty()) {
            auto [t_idx, kp] = legal_stack.back();
            legal_stack.pop_back();
            const Triangle& t = tris[t_idx];
            int nb_idx = t.n[kp];
            if (nb_idx < 0) continue;
            const Triangle& nb = tris[nb_idx];
            int m = 0;
            while (nb.n[m] != t_idx) ++m;
            int q = nb.v[m];
            int p = t.v[kp], a = t.v[mod3(kp + 1)], b = t.v[mod3(kp + 2)];
            // strictly-inside test; cocircular points do not flip, so the
            // diagonal is fixed by insertion order
            if (incircle(pts[p].x, pts[p].y, pts[a].x, pts[a].y, pts[b].x, pts[b].y,
                         pts[q].x, pts[q].y) > 0) {
                flip(t_idx, kp);
                legal_stack.emplace_back(t_idx, 0);   // now (p, a, q)
                legal_stack.emplace_back(nb_idx, 0);  // now (p, q, b)
            }
        }
    }

    void split_interior(int t_idx, int pi) {
        Triangle t = tris[t_idx];
        int v0 = t.v[0], v1 = t.v[1], v2 = t.v[2];
        int n0 = t.n[0], n1 = t.n[1], n2 = t.n[2];
        int i0 = t_idx;
        tris[i0] = Triangle{{pi, v1, v2}, {n0, -1, -1}};
        int i1 = alloc(Triangle{{pi, v2, v0}, {n1, -1, i0}});
        int i2 = alloc(Triangle{{pi, v0, v1}, {n2, i0, i1}});
        tris[i0].n[1] = i1;
        tris[i0].n[2] = i2;
        tris[i1].n[1] = i2;
        set_backpointer(n1, t_idx, i1);
        set_backpointer(n2, t_idx, i2);
        legal_stack.emplace_back(i0, 0);
        legal_stack.emplace_back(i1, 0);
        legal_stack.emplace_back(i2, 0);
        hint = i2;
    }

    void split_edge(int t_idx, int k, int pi) {
        Triangle t = tris[t_idx];
        int c = t.v[k], a = t.v[mod3(k + 1)], b = t.v[mod3(k + 2)];
        int nb_idx = t.n[k];
        int n_ca = t.n[mod3(k + 2)];
        int n_bc = t.n[mod3(k + 1)];

        int i0 = t_idx;  // (c, a, pi)
        int i1;          // (c, pi, b)
        if (nb_idx < 0) {
            tris[i0] = Triangle{{c, a, pi}, {-1, -1, n_ca}};
            i1 = alloc(Triangle{{c, pi, b}, {-1, n_bc, i0}});
            tris[i0].n[1] = i1;
            set_backpointer(n_bc, t_idx, i1);
            legal_stack.emplace_back(i0, 2);
            legal_stack.emplace_back(i1, 1);
        } else {
            Triangle nb = tris[nb_idx];
            int m = 0;
            while (nb.n[m] != t_idx) ++m;
            int q = nb.v[m];
            assert(nb.v[mod3(m + 1)] == b && nb.v[mod3(m + 2)] == a);
            int n_qb = nb.n[mod3(m + 2)];
            int n_aq = nb.n[mod3(m + 1)];

            int j0 = nb_idx;  // (q, b, pi)
            tris[i0] = Triangle{{c, a, pi}, {-1, -1, n_ca}};
            i1 = alloc(Triangle{{c, pi, b}, {-1, n_bc, i0}});
            tris[i0].n[1] = i1;
            tris[j0] = Triangle{{q, b, pi}, {i1, -1, n_qb}};
            int j1 = alloc(Triangle{{q, pi, a}, {i0, n_aq, j0}});
            tris[j0].n[1] = j1;
            tris[i0].n[0] = j1;
            tris[i1].n[0] = j0;
            set_backpointer(n_bc, t_idx, i1);
            set_backpointer(n_aq, nb_idx, j1);
            legal_stack.emplace_back(i0, 2);
            legal_stack.emplace_back(i1, 1);
            legal_stack.emplace_back(j0, 2);
            legal_stack.emplace_back(j1, 1);
        }
        hint = i1;
    }

    void insert_outside(int pi) {
        Vec2 p = pts[pi];
        // strictly visible hull edges, scanned in deterministic order
        struct VisEdge {
            int tri, k, a, b;
        };
        std::vector<VisEdge> visible;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            if (!alive[t]) continue;
            for (int k = 0; k < 3; ++k) {
                if (tris[t].n[k] != -1) continue;
                int a = tris[t].v[mod3(k + 1)];
                int b = tris[t].v[mod3(k + 2)];
                if (orient(a, b, p) < 0) visible.push_back({static_cast<int>(t), k, a, b});
            }
        }
        if (visible.empty()) throw std::runtime_error("delaunay: point outside hull sees no edge");

        // new fan triangles (b, a, pi); stitch consecutive ones via the shared
        // hull vertex (edge a1->b1 followed by b1==a2 -> b2)
        std::unordered_map<int, int> tri_ending_at;    // hull vertex b -> new tri over (a,b)
        std::unordered_map<int, int> tri_starting_at;  // hull vertex a -> new tri over (a,b)
        std::vector<int> created;
        created.reserve(visible.size());
        for (const auto& e : visible) {
            int nt = alloc(Triangle{{e.b, e.a, pi}, {-1, -1, e.tri}});
            tris[e.tri].n[e.k] = nt;
            tri_ending_at[e.b] = nt;
            tri_starting_at[e.a] = nt;
            created.push_back(nt);
        }
        for (const auto& e : visible) {
            int nt = tri_ending_at[e.b];
            // neighbor across edge (pi, b): the new triangle starting at b
            auto it = tri_starting_at.find(e.b);
            if (it != tri_starting_at.end()) tris[nt].n[1] = it->second;  // opposite a
            // neighbor across edge (a, pi): the new triangle ending at a
            auto jt = tri_ending_at.find(e.a);
            if (jt != tri_ending_at.end()) tris[nt].n[0] = jt->second;  // opposite b
        }
        for (int nt : created) legal_stack.emplace_back(nt, 2);
        legalize();
        hint = created.back();
    }

    void insert(int pi) {
        Vec2 p = pts[pi];
        int t = walk(p, hint);
        if (t < 0) {
            insert_outside(pi);
            return;
        }
        // on-edge check
        for (int k = 0; k < 3; ++k) {
            int a = tris[t].v[mod3(k + 1)];
            int b = tris[t].v[mod3(k + 2)];
            if (orient(a, b, p) == 0) {
                split_edge(t, k, pi);
                legalize();
                return;
            }
        }
        split_interior(t, pi);
        legalize();
    }
};

}  // namespace

Triangulation build_delaunay(const FloatingMesh& mesh) {
    const auto& samples = mesh.samples();
    if (samples.size() < 3) throw std::runtime_error("degenerate point set: fewer than 3 samples");

    std::vector<Vec2> pts(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) pts[i] = {samples[i].x, samples[i].y};

    // first non-collinear triple (0, 1, j) seeds the triangulation
    int j = -1, ori = 0;
    for (std::size_t k = 2; k < pts.size(); ++k) {
        ori = orient2d(pts[0].x, pts[0].y, pts[1].x, pts[1].y, pts[k].x, pts[k].y);
        if (ori != 0) {
            j = static_cast<int>(k);
            break;
        }
    }
    if (j < 0) throw std::runtime_error("degenerate point set: all samples collinear");

    Builder bld(pts);
    if (ori > 0)
        bld.alloc(Triangle{{0, 1, j}, {-1, -1, -1}});
    else
        bld.alloc(Triangle{{0, j, 1}, {-1, -1, -1}});

    for (std::size_t i = 2; i < pts.size(); ++i) {
        if (static_cast<int>(i) == j) continue;
        bld.insert(static_cast<int>(i));
    }

    Triangulation out;
    out.positions_ = std::move(pts);
    out.values_.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out.values_[i] = samples[i].value;

    // compact live triangles
    std::vector<int> remap(bld.tris.size(), -1);
    for (std::size_t t = 0; t < bld.tris.size(); ++t) {
        if (bld.alive[t]) {
            remap[t] = static_cast<int>(out.triangles_.size());
            out.triangles_.push_back(bld.tris[t]);
        }
    }
    for (auto& t : out.triangles_)
        for (int k = 0; k < 3; ++k)
            if (t.n[k] >= 0) t.n[k] = remap[t.n[k]];

    // ordered hull: chain the directed boundary edges
    std::unordered_map<int, int> next;
    for (const auto& t : out.triangles_)
        for (int k = 0; k < 3; ++k)
            if (t.n[k] < 0) next[t.v[mod3(k + 1)]] = t.v[mod3(k + 2)];
    if (!next.empty()) {
        int start = next.begin()->first;
        for (const auto& [a, b] : next) start = std::min(start, a);
        int cur = start;
        do {
            out.hull_.push_back(cur);
            cur = next.at(cur);
        } while (cur != start && out.hull_.size() <= next.size());
    }
    return out;
}

int Triangulation::locate(Vec2 q, int& hint) const {
    if (triangles_.empty()) return kOutside;
    int t = (hint >= 0 && hint < static_cast<int>(triangles_.size())) ? hint : 0;
    std::size_t steps = 0, cap = 4 * triangles_.size() + 16;
    while (true) {
        if (++steps > cap) break;  // degenerate cycle, fall through to scan
        bool moved = false;
        for (int k = 0; k < 3; ++k) {
            const Vec2& a = positions_[triangles_[t].v[mod3(k + 1)]];
            const Vec2& b = positions_[triangles_[t].v[mod3(k + 2)]];
            if (orient2d(a.x, a.y, b.x, b.y, q.x, q.y) < 0) {
                int nb = triangles_[t].n[k];
                if (nb < 0) return kOutside;
                t = nb;
                moved = true;
                break;
            }
        }
        if (!moved) {
            hint = t;
            return t;
        }
    }
    for (std::size_t t2 = 0; t2 < triangles_.size(); ++t2) {
        bool inside = true;
        for (int k = 0; k < 3 && inside; ++k) {
            const Vec2& a = positions_[triangles_[t2].v[mod3(k + 1)]];
            const Vec2& b = positions_[triangles_[t2].v[mod3(k + 2)]];
            inside = orient2d(a.x, a.y, b.x, b.y, q.x, q.y) >= 0;
        }
        if (inside) {
            hint = static_cast<int>(t2);
            return static_cast<int>(t2);
        }
    }
    return kOutside;
}

Vec2 Triangulation::circumcenter(int tri) const {
    const Vec2& a = positions_[triangles_[tri].v[0]];
    const Vec2& b = positions_[triangles_[tri].v[1]];
    const Vec2& c = positions_[triangles_[tri].v[2]];
    double bx = b.x - a.x, by = b.y - a.y;
    double cx = c.x - a.x, cy = c.y - a.y;
    double d = 2.0 * (bx * cy - by * cx);
    double b2 = bx * bx + by * by;
    double c2 = cx * cx + cy * cy;
    return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

double Triangulation::triangle_area(int tri) const {
    const Vec2& a = positions_[triangles_[tri].v[0]];
    const Vec2& b = positions_[triangles_[tri].v[1]];
    const Vec2& c = positions_[triangles_[tri].v[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

}  // namespace fmr
