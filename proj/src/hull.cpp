#include "vrsverb/hull.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>

namespace vrsverb::hull {

namespace {

struct Face {
    int a, b, c;
    Vec3 normal;     // not normalized
    double offset;   // normal . vertex
    bool alive = true;
};

double signed_dist(const Face& f, const Vec3& p) { return f.normal.dot(p) - f.offset; }

Face make_face(const std::vector<Vec3>& pts, int a, int b, int c, const Vec3& inside) {
    Face f{a, b, c, {}, 0.0, true};
    f.normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    f.offset = f.normal.dot(pts[a]);
    if (signed_dist(f, inside) > 0.0) {
        std::swap(f.b, f.c);
        f.normal = -f.normal;
        f.offset = -f.offset;
    }
    return f;
}

}  // namespace

ConvexHull convex_hull(const std::vector<Vec3>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw std::invalid_argument("convex_hull: need at least 4 points");

    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, std::max({std::abs(p.x), std::abs(p.y), std::abs(p.z)}));
    if (scale == 0.0) throw std::invalid_argument("convex_hull: degenerate input");

    // Initial tetrahedron from extreme points, selected on the original
    // coordinates so genuinely degenerate input is rejected before joggling.
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (pts[i].x < pts[i0].x) i0 = i;
    int i1 = -1;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
        const double d = (pts[i] - pts[i0]).norm();
        if (i != i0 && d > best) best = d, i1 = i;
    }
    int i2 = -1;
    best = -1.0;
    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1) continue;
        const double d = (pts[i1] - pts[i0]).cross(pts[i] - pts[i0]).norm();
        if (d > best) best = d, i2 = i;
    }
    if (i2 < 0 || best < 1e-9 * scale * scale)
        throw std::invalid_argument("convex_hull: collinear input");
    const Vec3 nrm = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]);
    int i3 = -1;
    best = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2) continue;
        const double d = std::abs(nrm.dot(pts[i] - pts[i0]));
        if (d > best) best = d, i3 = i;
    }
    if (i3 < 0 || best < 1e-7 * scale * scale * scale)
        throw std::invalid_argument("convex_hull: coplanar input");

    // Joggle breaks exactly coplanar quads (cube faces, ring layouts) without
    // moving any cospherical point off the hull.
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> jit(-1.0, 1.0);
    std::vector<Vec3> q(pts);
    for (auto& p : q) {
        p.x += 1e-9 * scale * jit(rng);
        p.y += 1e-9 * scale * jit(rng);
        p.z += 1e-9 * scale * jit(rng);
    }

    const Vec3 inside = (q[i0] + q[i1] + q[i2] + q[i3]) * 0.25;
    std::vector<Face> faces;
    faces.push_back(make_face(q, i0, i1, i2, inside));
    faces.push_back(make_face(q, i0, i1, i3, inside));
    faces.push_back(make_face(q, i0, i2, i3, inside));
    faces.push_back(make_face(q, i1, i2, i3, inside));

    const double eps = 1e-12 * scale * scale;
    for (int i = 0; i < n; ++i) {
        if (i == i0 || i == i1 || i == i2 || i == i3) continue;

        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f)
            if (faces[f].alive && signed_dist(faces[f], q[i]) > eps) visible.push_back(f);
        if (visible.empty()) continue;  // interior

        // Horizon = undirected edges used exactly once among visible faces.
        std::map<std::pair<int, int>, std::pair<int, int>> edges;  // sorted -> directed
        for (int f : visible) {
            const int v[3] = {faces[f].a, faces[f].b, faces[f].c};
            for (int e = 0; e < 3; ++e) {
                const int u = v[e], w = v[(e + 1) % 3];
                const auto key = std::minmax(u, w);
                auto it = edges.find(key);
                if (it == edges.end())
                    edges.emplace(key, std::make_pair(u, w));
                else
                    edges.erase(it);
            }
        }
        for (int f : visible) faces[f].alive = false;
        for (const auto& [key, dir] : edges) {
            // Keep winding consistent with the removed face: the new face sees
            // the edge in reversed direction.
            faces.push_back(make_face(q, dir.second, dir.first, i, inside));
        }
    }

    ConvexHull out;
    out.points = pts;
    for (const auto& f : faces)
        if (f.alive) out.faces.push_back({f.a, f.b, f.c});
    return out;
}

double ConvexHull::volume() const {
    double v = 0.0;
    for (const auto& f : faces) {
        const Vec3& a = points[f[0]];
        const Vec3& b = points[f[1]];
        const Vec3& c = points[f[2]];
        v += a.dot(b.cross(c)) / 6.0;
    }
    return std::abs(v);
}

double ConvexHull::surface_area() const {
    double area = 0.0;
    for (const auto& f : faces) {
        const Vec3& a = points[f[0]];
        const Vec3& b = points[f[1]];
        const Vec3& c = points[f[2]];
        area += 0.5 * (b - a).cross(c - a).norm();
    }
    return area;
}

double sphericity(const std::vector<Vec3>& pts) {
    const ConvexHull h = convex_hull(pts);
    const double v = h.volume();
    const double a = h.surface_area();
    return std::cbrt(kPi) * std::pow(6.0 * v, 2.0 / 3.0) / a;
}

}  // namespace vrsverb::hull
