#include "polybill/singular.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace polybill {

std::vector<SingularCurve> singular_set_s1_plus(const Polygon& poly) {
    std::vector<SingularCurve> out;
    const int n = poly.size();
    for (int k = 0; k < n; ++k) {
        Vec2 ck = poly.vertex(k);
        Vec2 u = poly.tangent(k);
        Vec2 nrm = poly.inward_normal(k);
        double len = poly.edge_length(k);
        for (int j = 0; j < n; ++j) {
            if (j == k || j == poly.wrap(k + 1)) continue;
            Vec2 cj = poly.vertex(j);
            double l = dot(cj - ck, nrm);
            if (l <= kGeomTol) continue;
            double sbar = dot(cj - ck, u);
            // Visibility of vertex j can only change where the line through it and
            // another vertex crosses edge k.
            std::vector<double> cuts{0.0, len};
            for (int i = 0; i < n; ++i) {
                if (i == j) continue;
                Vec2 dir = poly.vertex(i) - cj;
                double dn = dot(dir, nrm);
                if (std::abs(dn) <= 1e-15) continue;
                double tau = -l / dn;
                double c = dot(cj - ck + tau * dir, u);
                if (c > 0.0 && c < len) cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            std::optional<SingularCurve> cur;
            for (size_t c = 0; c + 1 < cuts.size(); ++c) {
                double a = cuts[c], b = cuts[c + 1];
                if (b - a <= kGeomTol) continue;
                Vec2 p = ck + (0.5 * (a + b)) * u;
                bool visible = poly.segment_inside(p, cj);
                if (visible) {
                    if (!cur) {
                        cur = SingularCurve{k, j, poly.vertex_arclength(k) + a, 0.0, poly.vertex_arclength(k) + sbar, l};
                    }
                    cur->s_hi = poly.vertex_arclength(k) + b;
                } else if (cur) {
                    out.push_back(*cur);
                    cur.reset();
                }
            }
            if (cur) out.push_back(*cur);
        }
    }
    return out;
}

std::vector<ImageCurve> singular_set_s1_minus(const Polygon& poly, const ReflectionLaw& f) {
    std::vector<ImageCurve> out;
    for (const auto& c : singular_set_s1_plus(poly)) out.push_back(ImageCurve{c, f});
    return out;
}

namespace {

struct Sample {
    bool valid = false;
    std::vector<int> key;
    PhasePoint point;
};

Sample pull(const Polygon& poly, const ReflectionLaw& f, const SingularCurve& c, double u, int k) {
    Sample out;
    PhasePoint y{u, c.theta(u)};
    for (int i = 0; i < k; ++i) {
        auto pre = inverse_step(poly, f, y);
        if (!pre) return out;
        y = *pre;
        out.key.push_back(poly.edge_at(y.s));
    }
    out.valid = true;
    out.point = y;
    return out;
}

// Last parameter between a (valid with key) and b that still has the same key.
Sample refine(const Polygon& poly, const ReflectionLaw& f, const SingularCurve& c, int k, double a, double b,
              const std::vector<int>& key) {
    Sample best = pull(poly, f, c, a, k);
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (a + b);
        if (mid == a || mid == b) break;
        Sample sm = pull(poly, f, c, mid, k);
        if (sm.valid && sm.key == key) {
            a = mid;
            best = sm;
        } else {
            b = mid;
        }
    }
    return best;
}

}  // namespace

std::vector<CurvePiece> pullback_singular(const Polygon& poly, const ReflectionLaw& f, int m, int resolution) {
    if (m < 1) throw std::invalid_argument("pullback order must be at least 1");
    if (resolution < 2) throw std::invalid_argument("resolution must be at least 2");
    std::vector<CurvePiece> out;
    auto curves = singular_set_s1_plus(poly);
    for (size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        CurvePiece piece;
        piece.generation = 0;
        piece.source = static_cast<int>(ci);
        piece.edge = c.edge;
        for (int i = 0; i < resolution; ++i) {
            double u = c.s_lo + (c.s_hi - c.s_lo) * i / (resolution - 1);
            piece.points.push_back({u, c.theta(u)});
        }
        out.push_back(std::move(piece));
    }
    if (m == 1) return out;
    if (!f.is_invertible()) throw ReflectionError("pullbacks need an invertible reflection law");
    for (int k = 1; k < m; ++k) {
        for (size_t ci = 0; ci < curves.size(); ++ci) {
            const auto& c = curves[ci];
            std::vector<double> us;
            us.push_back(c.s_lo);
            for (int i = 0; i < resolution; ++i) us.push_back(c.s_lo + (c.s_hi - c.s_lo) * (i + 0.5) / resolution);
            us.push_back(c.s_hi);
            std::optional<CurvePiece> cur;
            Sample prev = pull(poly, f, c, us[0], k);
            auto start_piece = [&](const Sample& s) {
                CurvePiece p;
                p.generation = k;
                p.source = static_cast<int>(ci);
                p.itinerary = s.key;
                p.edge = s.key.back();
                cur = std::move(p);
            };
            if (prev.valid) {
                start_piece(prev);
                cur->points.push_back(prev.point);
            }
            for (size_t i = 1; i < us.size(); ++i) {
                Sample s = pull(poly, f, c, us[i], k);
                bool same = prev.valid && s.valid && s.key == prev.key;
                if (!same) {
                    if (prev.valid) {
                        Sample end = refine(poly, f, c, k, us[i - 1], us[i], prev.key);
                        cur->points.push_back(end.point);
                        out.push_back(std::move(*cur));
                        cur.reset();
                    }
                    if (s.valid) {
                        Sample begin = refine(poly, f, c, k, us[i], us[i - 1], s.key);
                        start_piece(s);
                        cur->points.push_back(begin.point);
                    }
                }
                if (s.valid) cur->points.push_back(s.point);
                prev = std::move(s);
            }
            if (cur) out.push_back(std::move(*cur));
        }
    }
    return out;
}

namespace {

struct Event {
    PhasePoint at;
    std::set<int> pieces;
};

bool segment_cross(PhasePoint a, PhasePoint b, PhasePoint c, PhasePoint d, PhasePoint& hit) {
    double rx = b.s - a.s, ry = b.theta - a.theta;
    double sx = d.s - c.s, sy = d.theta - c.theta;
    double den = rx * sy - ry * sx;
    if (std::abs(den) < 1e-300) return false;
    double qx = c.s - a.s, qy = c.theta - a.theta;
    double t = (qx * sy - qy * sx) / den;
    double u = (qx * ry - qy * rx) / den;
    if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) return false;
    hit = {a.s + t * rx, a.theta + t * ry};
    return true;
}

double point_segment_distance(PhasePoint p, PhasePoint a, PhasePoint b) {
    double rx = b.s - a.s, ry = b.theta - a.theta;
    double len2 = rx * rx + ry * ry;
    double t = len2 > 0.0 ? ((p.s - a.s) * rx + (p.theta - a.theta) * ry) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(p.s - a.s - t * rx, p.theta - a.theta - t * ry);
}

struct Box {
    double s0, s1, t0, t1;
    size_t first, last;  // segment indices [first, last)
};

std::vector<Box> chunk_boxes(const std::vector<PhasePoint>& pts, double pad) {
    std::vector<Box> out;
    const size_t chunk = 16;
    for (size_t i = 0; i + 1 < pts.size(); i += chunk) {
        size_t last = std::min(pts.size() - 1, i + chunk);
        Box b{pts[i].s, pts[i].s, pts[i].theta, pts[i].theta, i, last};
        for (size_t j = i; j <= last; ++j) {
            b.s0 = std::min(b.s0, pts[j].s);
            b.s1 = std::max(b.s1, pts[j].s);
            b.t0 = std::min(b.t0, pts[j].theta);
            b.t1 = std::max(b.t1, pts[j].theta);
        }
        b.s0 -= pad;
        b.s1 += pad;
        b.t0 -= pad;
        b.t1 += pad;
        out.push_back(b);
    }
    return out;
}

bool boxes_overlap(const Box& a, const Box& b) { return a.s0 <= b.s1 && b.s0 <= a.s1 && a.t0 <= b.t1 && b.t0 <= a.t1; }

}  // namespace

int branch_multiplicity(const Polygon& poly, const std::vector<CurvePiece>& pieces, double touch_tol) {
    if (pieces.empty()) return 1;
    const double edge_tol = 1e-6;
    auto interior = [&](PhasePoint p) {
        if (std::abs(p.theta) >= 0.5 * kPi - edge_tol) return false;
        for (int i = 0; i <= poly.size(); ++i) {
            double v = (i == poly.size()) ? poly.perimeter() : poly.vertex_arclength(i);
            if (std::abs(p.s - v) < edge_tol) return false;
        }
        return true;
    };
    std::vector<std::vector<Box>> boxes;
    boxes.reserve(pieces.size());
    for (const auto& p : pieces) boxes.push_back(chunk_boxes(p.points, touch_tol));
    std::vector<Event> events;
    for (size_t a = 0; a < pieces.size(); ++a) {
        for (size_t b = a + 1; b < pieces.size(); ++b) {
            if (pieces[a].edge != pieces[b].edge) continue;
            const auto& pa = pieces[a].points;
            const auto& pb = pieces[b].points;
            for (const auto& ba : boxes[a]) {
                for (const auto& bb : boxes[b]) {
                    if (!boxes_overlap(ba, bb)) continue;
                    for (size_t i = ba.first; i < ba.last; ++i) {
                        for (size_t j = bb.first; j < bb.last; ++j) {
                            PhasePoint hit;
                            if (segment_cross(pa[i], pa[i + 1], pb[j], pb[j + 1], hit) && interior(hit))
                                events.push_back({hit, {static_cast<int>(a), static_cast<int>(b)}});
                        }
                    }
                }
            }
            // Endpoints of one piece lying on the other.
            for (int pass = 0; pass < 2; ++pass) {
                size_t x = pass == 0 ? a : b;
                size_t y = pass == 0 ? b : a;
                const auto& px = pieces[x].points;
                const auto& py = pieces[y].points;
                if (px.empty() || py.size() < 2) continue;
                for (PhasePoint e : {px.front(), px.back()}) {
                    if (!interior(e)) continue;
                    for (const auto& by : boxes[y]) {
                        if (e.s < by.s0 || e.s > by.s1 || e.theta < by.t0 || e.theta > by.t1) continue;
                        bool touched = false;
                        for (size_t j = by.first; j < by.last && !touched; ++j)
                            touched = point_segment_distance(e, py[j], py[j + 1]) < touch_tol;
                        if (touched) {
                            events.push_back({e, {static_cast<int>(x), static_cast<int>(y)}});
                            break;
                        }
                    }
                }
            }
        }
    }
    // Merge events that sit at the same point.
    std::vector<bool> used(events.size(), false);
    size_t best = 1;
    const double merge_tol = 10.0 * touch_tol;
    for (size_t i = 0; i < events.size(); ++i) {
        if (used[i]) continue;
        std::set<int> members = events[i].pieces;
        used[i] = true;
        for (size_t j = i + 1; j < events.size(); ++j) {
            if (used[j]) continue;
            if (std::hypot(events[i].at.s - events[j].at.s, events[i].at.theta - events[j].at.theta) < merge_tol) {
                members.insert(events[j].pieces.begin(), events[j].pieces.end());
                used[j] = true;
            }
        }
        best = std::max(best, members.size());
    }
    return 1 + static_cast<int>(best);
}

PEstimate p_of_S(const Polygon& poly, const ReflectionLaw& f, int m, int resolution, int max_rounds) {
    PEstimate est;
    std::vector<int> values;
    int res = resolution;
    for (int r = 0; r < max_rounds; ++r) {
        auto pieces = pullback_singular(poly, f, m, res);
        values.push_back(branch_multiplicity(poly, pieces, 1e-7));
        est.p = values.back();
        est.resolution = res;
        est.rounds = r + 1;
        size_t k = values.size();
        if (k >= 3 && values[k - 1] == values[k - 2] && values[k - 2] == values[k - 3]) break;
        res *= 2;
    }
    return est;
}

}  // namespace polybill
