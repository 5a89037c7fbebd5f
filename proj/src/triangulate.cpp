#include "triangulate.hpp"

#include "hpmod/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace hpmod::detail {

namespace {

std::uint64_t directed_key(int u, int v) {
    return (std::uint64_t(std::uint32_t(u)) << 32) | std::uint32_t(v);
}

std::uint64_t undirected_key(int u, int v) {
    return u < v ? directed_key(u, v) : directed_key(v, u);
}

// Positive when d lies inside the circumcircle of the counterclockwise (a, b, c).
// The second member bounds the rounding error scale.
std::pair<double, double> incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double adx = a.x - d.x, ady = a.y - d.y;
    const double bdx = b.x - d.x, bdy = b.y - d.y;
    const double cdx = c.x - d.x, cdy = c.y - d.y;
    const double alift = adx * adx + ady * ady;
    const double blift = bdx * bdx + bdy * bdy;
    const double clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdx * cdy - bdy * cdx) + blift * (cdx * ady - cdy * adx) +
                       clift * (adx * bdy - ady * bdx);
    const double perm = alift * (std::abs(bdx * cdy) + std::abs(bdy * cdx)) +
                        blift * (std::abs(cdx * ady) + std::abs(cdy * adx)) +
                        clift * (std::abs(adx * bdy) + std::abs(ady * bdx));
    return {det, perm};
}

bool in_circle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const auto [det, perm] = incircle(a, b, c, d);
    return det > 1e-12 * perm;
}

Point2 circumcenter(const Point2& a, const Point2& b, const Point2& c) {
    const Point2 ba = b - a;
    const Point2 ca = c - a;
    const double d = 2.0 * cross(ba, ca);
    const double bb = norm2(ba);
    const double cc = norm2(ca);
    return a + Point2{(ca.y * bb - ba.y * cc) / d, (ba.x * cc - ca.x * bb) / d};
}

double min_angle(const Point2& a, const Point2& b, const Point2& c) {
    auto angle = [](const Point2& p, const Point2& q, const Point2& r) {
        const Point2 u = q - p;
        const Point2 v = r - p;
        return std::atan2(std::abs(cross(u, v)), dot(u, v));
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

bool properly_cross(const Point2& p, const Point2& q, const Point2& u, const Point2& v) {
    const double o1 = orient(p, q, u);
    const double o2 = orient(p, q, v);
    const double o3 = orient(u, v, p);
    const double o4 = orient(u, v, q);
    return ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
}

class Cdt {
public:
    explicit Cdt(const Pslg& input) {
        double xmin = std::numeric_limits<double>::infinity(), ymin = xmin;
        double xmax = -xmin, ymax = -xmin;
        for (const auto& p : input.points) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        const Point2 c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
        span_ = std::max(xmax - xmin, ymax - ymin);
        const double r = 20.0 * span_;
        pts_.push_back(c + Point2{-r, -r});
        pts_.push_back(c + Point2{r, -r});
        pts_.push_back(c + Point2{0.0, r});
        add_triangle(0, 1, 2, false);
        for (const auto& p : input.points) pts_.push_back(p);
        for (auto s : input.segments) {
            s.a += kOffset;
            s.b += kOffset;
            segments_.push_back(s);
        }
    }

    void build() {
        const int n = int(pts_.size());
        for (int i = kOffset; i < n; ++i) insert_vertex(i, -1);
        for (std::size_t s = 0; s < segments_.size(); ++s) recover(segments_[s].a, segments_[s].b);
        constraint_.clear();
        for (std::size_t s = 0; s < segments_.size(); ++s) {
            constraint_[undirected_key(segments_[s].a, segments_[s].b)] = int(s);
        }
        lawson();
        classify();
    }

    void refine(const RefineControls& controls) {
        const double min_ang = controls.min_angle_deg * std::numbers::pi / 180.0;
        const int max_points = controls.max_points + kOffset;
        split_encroached_segments(max_points);

        std::unordered_set<std::uint64_t> given_up;
        auto tri_key = [](std::array<int, 3> v) {
            std::sort(v.begin(), v.end());
            return (std::uint64_t(v[0]) * 1000003u + std::uint64_t(v[1])) * 1000003u + std::uint64_t(v[2]);
        };
        std::deque<int> work;
        for (int t = 0; t < int(tris_.size()); ++t) {
            if (tris_[t].alive && tris_[t].inside) work.push_back(t);
        }
        while (!work.empty() && int(pts_.size()) < max_points) {
            const int t = work.front();
            work.pop_front();
            if (!tris_[t].alive || !tris_[t].inside) continue;
            const auto& v = tris_[t].v;
            const Point2 a = pts_[v[0]], b = pts_[v[1]], c = pts_[v[2]];
            const double longest = std::max({distance(a, b), distance(b, c), distance(c, a)});
            const Point2 centroid = (a + b + c) / 3.0;
            const bool bad = min_angle(a, b, c) < min_ang ||
                             (controls.size && longest > controls.size(centroid));
            if (!bad) continue;
            const std::uint64_t key = tri_key(v);
            if (given_up.count(key)) continue;

            const Point2 cc = circumcenter(a, b, c);
            std::vector<int> encroached;
            bool blocked = false;
            for (std::size_t s = 0; s < segments_.size(); ++s) {
                const Point2 pa = pts_[segments_[s].a];
                const Point2 pb = pts_[segments_[s].b];
                if (dot(pa - cc, pb - cc) < 0.0) {
                    if (segments_[s].splittable) {
                        encroached.push_back(int(s));
                    } else {
                        blocked = true;
                    }
                }
            }
            if (!encroached.empty()) {
                for (int s : encroached) {
                    for (int nt : split_segment(s)) work.push_back(nt);
                }
                if (tris_[t].alive) work.push_back(t);
                continue;
            }
            if (blocked) {
                given_up.insert(key);
                continue;
            }
            const int loc = locate(cc);
            if (loc < 0 || !tris_[loc].inside) {
                given_up.insert(key);
                continue;
            }
            pts_.push_back(cc);
            for (int nt : insert_vertex(int(pts_.size()) - 1, -1)) work.push_back(nt);
        }
    }

    Triangulation result() const {
        Triangulation out;
        out.points.assign(pts_.begin() + kOffset, pts_.end());
        for (const auto& t : tris_) {
            if (!t.alive || !t.inside) continue;
            out.triangles.push_back({t.v[0] - kOffset, t.v[1] - kOffset, t.v[2] - kOffset});
        }
        for (auto s : segments_) {
            s.a -= kOffset;
            s.b -= kOffset;
            out.segments.push_back(s);
        }
        return out;
    }

private:
    static constexpr int kOffset = 3;

    struct Tri {
        std::array<int, 3> v;
        bool alive = true;
        bool inside = false;
    };

    std::vector<Point2> pts_;
    std::vector<Tri> tris_;
    std::vector<int> free_;
    std::unordered_map<std::uint64_t, int> edges_;       // directed edge -> triangle
    std::unordered_map<std::uint64_t, int> constraint_;  // undirected edge -> segment
    std::vector<PslgSegment> segments_;
    double span_ = 1.0;

    int add_triangle(int a, int b, int c, bool inside) {
        int id;
        if (!free_.empty()) {
            id = free_.back();
            free_.pop_back();
            tris_[id] = Tri{{a, b, c}, true, inside};
        } else {
            id = int(tris_.size());
            tris_.push_back(Tri{{a, b, c}, true, inside});
        }
        edges_[directed_key(a, b)] = id;
        edges_[directed_key(b, c)] = id;
        edges_[directed_key(c, a)] = id;
        return id;
    }

    void kill_triangle(int t) {
        auto& tri = tris_[t];
        for (int i = 0; i < 3; ++i) {
            auto it = edges_.find(directed_key(tri.v[i], tri.v[(i + 1) % 3]));
            if (it != edges_.end() && it->second == t) edges_.erase(it);
        }
        tri.alive = false;
        free_.push_back(t);
    }

    int owner(int u, int v) const {
        auto it = edges_.find(directed_key(u, v));
        return it == edges_.end() ? -1 : it->second;
    }

    bool constrained(int u, int v) const { return constraint_.count(undirected_key(u, v)) != 0; }

    // Triangle containing p (closed), preferring the most interior one.
    int locate(const Point2& p) const {
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int t = 0; t < int(tris_.size()); ++t) {
            if (!tris_[t].alive) continue;
            const auto& v = tris_[t].v;
            const Point2 a = pts_[v[0]], b = pts_[v[1]], c = pts_[v[2]];
            const double area = orient(a, b, c);
            const double l0 = orient(b, c, p) / area;
            const double l1 = orient(c, a, p) / area;
            const double l2 = orient(a, b, p) / area;
            const double score = std::min({l0, l1, l2});
            if (score > best_score) {
                best_score = score;
                best = t;
                if (score > 1e-3) break;
            }
        }
        return best_score >= -1e-10 ? best : -1;
    }

    // Bowyer-Watson insertion of vertex p that does not cross constrained
    // edges other than `allowed` (an undirected key, or -1). Returns the new
    // triangles.
    std::vector<int> insert_vertex(int p, std::int64_t allowed) {
        const Point2 pp = pts_[p];
        const int t0 = locate(pp);
        if (t0 < 0) throw Error(ErrorCode::Meshing, "triangulate: point outside the triangulation");

        std::vector<int> cavity{t0};
        std::unordered_set<int> in_cavity{t0};
        std::unordered_set<int> forced{t0};
        for (std::size_t k = 0; k < cavity.size(); ++k) {
            const auto v = tris_[cavity[k]].v;
            for (int i = 0; i < 3; ++i) {
                const int a = v[i], b = v[(i + 1) % 3];
                const bool crossing_allowed =
                    allowed >= 0 && undirected_key(a, b) == std::uint64_t(allowed);
                if (constrained(a, b) && !crossing_allowed) continue;
                const int nb = owner(b, a);
                if (nb < 0 || in_cavity.count(nb)) continue;
                const auto& w = tris_[nb].v;
                const Point2 pa = pts_[a], pb = pts_[b];
                const double len2 = norm2(pb - pa);
                const bool on_edge = std::abs(orient(pa, pb, pp)) <= 1e-12 * len2 &&
                                     dot(pp - pa, pb - pa) > 0 && dot(pp - pb, pa - pb) > 0;
                if (on_edge || in_circle(pts_[w[0]], pts_[w[1]], pts_[w[2]], pp)) {
                    cavity.push_back(nb);
                    in_cavity.insert(nb);
                    if (on_edge) forced.insert(nb);
                }
            }
        }

        // Shrink until the cavity is star-shaped with respect to p.
        std::vector<std::pair<std::array<int, 2>, int>> rim;
        for (int guard = 0;; ++guard) {
            rim.clear();
            int offending = -1;
            for (int t : cavity) {
                if (!in_cavity.count(t)) continue;
                const auto& v = tris_[t].v;
                for (int i = 0; i < 3; ++i) {
                    const int a = v[i], b = v[(i + 1) % 3];
                    const int nb = owner(b, a);
                    if (nb >= 0 && in_cavity.count(nb)) continue;
                    const double o = orient(pts_[a], pts_[b], pp);
                    if (!(o > 1e-14 * norm2(pts_[b] - pts_[a]))) {
                        if (!forced.count(t)) offending = t;
                    }
                    rim.push_back({{a, b}, t});
                }
                if (offending >= 0) break;
            }
            if (offending < 0) break;
            in_cavity.erase(offending);
            if (guard > 1000) throw Error(ErrorCode::Meshing, "triangulate: cavity repair failed");
        }
        for (const auto& [e, t] : rim) {
            if (!(orient(pts_[e[0]], pts_[e[1]], pp) > 0.0)) {
                throw Error(ErrorCode::Meshing, "triangulate: degenerate insertion");
            }
        }

        std::vector<bool> inside_of;
        for (const auto& [e, t] : rim) inside_of.push_back(tris_[t].inside);
        for (int t : cavity) {
            if (in_cavity.count(t)) kill_triangle(t);
        }
        std::vector<int> created;
        for (std::size_t i = 0; i < rim.size(); ++i) {
            created.push_back(add_triangle(rim[i].first[0], rim[i].first[1], p, inside_of[i]));
        }
        return created;
    }

    std::vector<int> split_segment(int s) {
        PslgSegment seg = segments_[s];
        const Point2 m = 0.5 * (pts_[seg.a] + pts_[seg.b]);
        pts_.push_back(m);
        const int id = int(pts_.size()) - 1;
        const std::uint64_t key = undirected_key(seg.a, seg.b);
        auto created = insert_vertex(id, std::int64_t(key));
        constraint_.erase(key);
        const double fm = 0.5 * (seg.fa + seg.fb);
        PslgSegment first = seg;
        first.b = id;
        first.fb = fm;
        PslgSegment second = seg;
        second.a = id;
        second.fa = fm;
        segments_[s] = first;
        segments_.push_back(second);
        constraint_[undirected_key(first.a, first.b)] = s;
        constraint_[undirected_key(second.a, second.b)] = int(segments_.size()) - 1;
        return created;
    }

    void split_encroached_segments(int max_points) {
        bool changed = true;
        while (changed && int(pts_.size()) < max_points) {
            changed = false;
            for (std::size_t s = 0; s < segments_.size(); ++s) {
                if (!segments_[s].splittable) continue;
                const int a = segments_[s].a, b = segments_[s].b;
                for (int t : {owner(a, b), owner(b, a)}) {
                    if (t < 0 || !tris_[t].inside) continue;
                    int w = -1;
                    for (int x : tris_[t].v) {
                        if (x != a && x != b) w = x;
                    }
                    if (dot(pts_[a] - pts_[w], pts_[b] - pts_[w]) < 0.0) {
                        split_segment(int(s));
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    // Replaces the diagonal (u, v) of a convex quadrilateral by (w1, w2).
    bool flip(int u, int v, int* w1_out = nullptr, int* w2_out = nullptr) {
        const int t1 = owner(u, v);
        const int t2 = owner(v, u);
        if (t1 < 0 || t2 < 0) return false;
        auto opposite = [&](int t) {
            for (int x : tris_[t].v) {
                if (x != u && x != v) return x;
            }
            return -1;
        };
        const int w1 = opposite(t1);
        const int w2 = opposite(t2);
        if (!(orient(pts_[w1], pts_[u], pts_[w2]) > 0.0) || !(orient(pts_[w2], pts_[v], pts_[w1]) > 0.0)) {
            return false;
        }
        const bool inside = tris_[t1].inside;
        kill_triangle(t1);
        kill_triangle(t2);
        add_triangle(w1, u, w2, inside);
        add_triangle(w2, v, w1, inside);
        if (w1_out) *w1_out = w1;
        if (w2_out) *w2_out = w2;
        return true;
    }

    // Sloan's edge-flip recovery of the constraint (p, q).
    void recover(int p, int q) {
        if (owner(p, q) >= 0 || owner(q, p) >= 0) return;
        const Point2 pp = pts_[p], pq = pts_[q];
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            for (int x : t.v) {
                if (x == p || x == q) continue;
                const Point2 z = pts_[x];
                if (std::abs(orient(pp, pq, z)) <= 1e-13 * norm2(pq - pp) && dot(z - pp, pq - pp) > 0 &&
                    dot(z - pq, pp - pq) > 0) {
                    throw Error(ErrorCode::Meshing, "triangulate: vertex lies on a constraint");
                }
            }
        }
        std::deque<std::array<int, 2>> crossing;
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            for (int i = 0; i < 3; ++i) {
                const int u = t.v[i], v = t.v[(i + 1) % 3];
                if (u > v && owner(v, u) >= 0) continue;
                if (u == p || u == q || v == p || v == q) continue;
                if (properly_cross(pp, pq, pts_[u], pts_[v])) crossing.push_back({u, v});
            }
        }
        long guard = 0;
        const long cap = 200 + 50L * long(crossing.size()) * long(crossing.size());
        while (!crossing.empty()) {
            if (++guard > cap) throw Error(ErrorCode::Meshing, "triangulate: constraint recovery stalled");
            const auto [u, v] = crossing.front();
            crossing.pop_front();
            if (owner(u, v) < 0 || owner(v, u) < 0) continue;
            int w1 = -1, w2 = -1;
            if (!flip(u, v, &w1, &w2)) {
                crossing.push_back({u, v});
                continue;
            }
            if (w1 != p && w1 != q && w2 != p && w2 != q && properly_cross(pp, pq, pts_[w1], pts_[w2])) {
                crossing.push_back({w1, w2});
            }
        }
        if (owner(p, q) < 0 && owner(q, p) < 0) {
            throw Error(ErrorCode::Meshing, "triangulate: constraint not recovered");
        }
    }

    void lawson() {
        std::deque<std::array<int, 2>> stack;
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            for (int i = 0; i < 3; ++i) stack.push_back({t.v[i], t.v[(i + 1) % 3]});
        }
        long guard = 0;
        const long cap = 100000 + 200L * long(stack.size());
        while (!stack.empty() && ++guard < cap) {
            const auto [u, v] = stack.back();
            stack.pop_back();
            if (constrained(u, v)) continue;
            const int t1 = owner(u, v);
            const int t2 = owner(v, u);
            if (t1 < 0 || t2 < 0) continue;
            int w2 = -1;
            for (int x : tris_[t2].v) {
                if (x != u && x != v) w2 = x;
            }
            const auto& a = tris_[t1].v;
            if (!in_circle(pts_[a[0]], pts_[a[1]], pts_[a[2]], pts_[w2])) continue;
            int w1 = -1;
            for (int x : a) {
                if (x != u && x != v) w1 = x;
            }
            if (!flip(u, v)) continue;
            stack.push_back({u, w2});
            stack.push_back({w2, v});
            stack.push_back({v, w1});
            stack.push_back({w1, u});
        }
    }

    // Crossing-parity flood fill from the super triangle.
    void classify() {
        std::vector<int> parity(tris_.size(), -1);
        std::deque<int> queue;
        for (int t = 0; t < int(tris_.size()); ++t) {
            if (!tris_[t].alive) continue;
            for (int x : tris_[t].v) {
                if (x < kOffset) {
                    parity[t] = 0;
                    queue.push_back(t);
                    break;
                }
            }
        }
        while (!queue.empty()) {
            const int t = queue.front();
            queue.pop_front();
            const auto v = tris_[t].v;
            for (int i = 0; i < 3; ++i) {
                const int a = v[i], b = v[(i + 1) % 3];
                const int nb = owner(b, a);
                if (nb < 0 || parity[nb] >= 0) continue;
                parity[nb] = parity[t] ^ (constrained(a, b) ? 1 : 0);
                queue.push_back(nb);
            }
        }
        for (int t = 0; t < int(tris_.size()); ++t) {
            if (tris_[t].alive) tris_[t].inside = parity[t] == 1;
        }
    }
};

}  // namespace

Triangulation triangulate(const Pslg& input, const RefineControls& controls) {
    Cdt cdt(input);
    cdt.build();
    cdt.refine(controls);
    return cdt.result();
}

}  // namespace hpmod::detail
