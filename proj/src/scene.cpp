#include "vrsverb/scene.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "vrsverb/hull.hpp"

namespace vrsverb::scene {

// ---------------------------------------------------------------------------
// Room / placement

double Room::wall_area(int wall) const {
    switch (wall) {
        case kWallXLow:
        case kWallXHigh:
            return dims.y * dims.z;
        case kWallYLow:
        case kWallYHigh:
            return dims.x * dims.z;
        default:
            return dims.x * dims.y;
    }
}

double Room::total_surface() const {
    return 2.0 * (dims.x * dims.y + dims.x * dims.z + dims.y * dims.z);
}

void Room::validate() const {
    if (!(dims.x > 0.0 && dims.y > 0.0 && dims.z > 0.0))
        throw std::invalid_argument("Room: dimensions must be positive");
    if (!(speed_of_sound > 0.0)) throw std::invalid_argument("Room: speed of sound must be positive");
    for (const auto& s : surfaces)
        for (double a : s.absorption)
            if (!(a >= 0.0 && a <= 1.0))
                throw std::invalid_argument("Room: absorption coefficients must be in [0,1]");
}

static bool strictly_inside(const Vec3& p, const Vec3& dims) {
    return p.x > 0.0 && p.x < dims.x && p.y > 0.0 && p.y < dims.y && p.z > 0.0 && p.z < dims.z;
}

void Placement::validate(const Room& room) const {
    if (!strictly_inside(source_pos, room.dims))
        throw std::invalid_argument("Placement: source outside room");
    if (!strictly_inside(receiver_pos, room.dims))
        throw std::invalid_argument("Placement: receiver outside room");
}

double listener_facing_azimuth_deg(const Placement& p) {
    const Vec3 to_source = p.source_pos - p.receiver_pos;
    return azimuth_deg(to_source) - p.receiver_yaw_deg;
}

// ---------------------------------------------------------------------------
// Loudspeaker arrays

void LoudspeakerArray::validate() const {
    for (const auto& s : speakers) {
        if (std::abs(s.dir.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("LoudspeakerArray: direction not unit length");
        if (!(s.radius > 0.0)) throw std::invalid_argument("LoudspeakerArray: radius must be > 0");
    }
    for (size_t i = 0; i < speakers.size(); ++i)
        for (size_t j = i + 1; j < speakers.size(); ++j)
            if (angle_between_deg(speakers[i].dir, speakers[j].dir) < 0.1)
                throw std::invalid_argument("LoudspeakerArray: coincident speakers");
}

LoudspeakerArray LoudspeakerArray::with_radius(double radius) const {
    LoudspeakerArray out = *this;
    for (auto& s : out.speakers) s.radius = radius;
    return out;
}

LoudspeakerArray build_ring_array(double radius) {
    struct Ring {
        double elevation;
        double step;
    };
    static const Ring rings[] = {{-60.0, 60.0}, {-30.0, 30.0}, {0.0, 7.5}, {30.0, 30.0}, {60.0, 60.0}};

    LoudspeakerArray a;
    a.label = "ring86";
    a.speakers.push_back({from_az_el(0.0, -90.0), radius});
    for (const Ring& r : rings) {
        const int count = static_cast<int>(std::lround(360.0 / r.step));
        for (int i = 0; i < count; ++i)
            a.speakers.push_back({from_az_el(i * r.step, r.elevation), radius});
    }
    a.speakers.push_back({from_az_el(0.0, 90.0), radius});
    a.validate();
    return a;
}

std::vector<Vec3> fibonacci_directions(int n) {
    // Golden-angle lattice with half-integer latitude offset.
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    std::vector<Vec3> dirs(n);
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double az = golden * i;
        dirs[i] = {r * std::cos(az), r * std::sin(az), z};
    }
    return dirs;
}

LoudspeakerArray build_fibonacci_array(int n, double radius) {
    if (n < 4) throw std::invalid_argument("build_fibonacci_array: need n >= 4");
    if (!(radius > 0.0)) throw std::invalid_argument("build_fibonacci_array: radius must be > 0");
    LoudspeakerArray a;
    a.label = "fib" + std::to_string(n);
    for (const Vec3& d : fibonacci_directions(n)) a.speakers.push_back({d, radius});
    a.validate();
    return a;
}

// ---------------------------------------------------------------------------
// VRS layouts

double min_pairwise_angle_deg(const std::vector<Vec3>& dirs) {
    double max_dot = -1.0;
    for (size_t i = 0; i < dirs.size(); ++i)
        for (size_t j = i + 1; j < dirs.size(); ++j)
            max_dot = std::max(max_dot, dirs[i].dot(dirs[j]));
    return rad2deg(std::acos(std::clamp(max_dot, -1.0, 1.0)));
}

static std::vector<Vec3> axes6() {
    return {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
}

static std::vector<Vec3> cuboctahedron12() {
    std::vector<Vec3> v;
    const double s = 1.0 / std::sqrt(2.0);
    for (double a : {1.0, -1.0})
        for (double b : {1.0, -1.0}) {
            v.push_back({a * s, b * s, 0.0});
            v.push_back({a * s, 0.0, b * s});
            v.push_back({0.0, a * s, b * s});
        }
    return v;
}

static std::vector<Vec3> snub_cube24() {
    // Tribonacci constant; vertices are even permutations of (1, 1/t, t) with
    // an even number of sign flips plus odd permutations with an odd number.
    const double t = 1.8392867552141612;
    const double c1 = 1.0, c2 = 1.0 / t, c3 = t;
    std::vector<Vec3> v;
    for (int sx = 0; sx < 2; ++sx)
        for (int sy = 0; sy < 2; ++sy)
            for (int sz = 0; sz < 2; ++sz) {
                const int flips = sx + sy + sz;
                const double x = sx ? -c1 : c1;
                const double y = sy ? -c2 : c2;
                const double z = sz ? -c3 : c3;
                if (flips % 2 == 0) {
                    v.push_back(Vec3{x, y, z}.normalized());
                    v.push_back(Vec3{z, x, y}.normalized());
                    v.push_back(Vec3{y, z, x}.normalized());
                } else {
                    v.push_back(Vec3{x, z, y}.normalized());
                    v.push_back(Vec3{z, y, x}.normalized());
                    v.push_back(Vec3{y, x, z}.normalized());
                }
            }
    return v;
}

static std::vector<Vec3> rotated(const std::vector<Vec3>& dirs, double z_deg, double x_deg) {
    std::vector<Vec3> out;
    out.reserve(dirs.size());
    for (const auto& d : dirs) out.push_back(rotate_x(rotate_z(d, z_deg), x_deg));
    return out;
}

static void append(std::vector<Vec3>& dst, const std::vector<Vec3>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

// Union of two snub cubes, the second rotated about z. 1 degree grid search
// maximizing Wadell sphericity of the hull keeps the construction
// deterministic.
static std::vector<Vec3> snub_union48(double* angle_out) {
    const auto base = snub_cube24();
    double best_angle = 0.0, best_sph = -1.0;
    for (int a = 1; a < 90; ++a) {
        std::vector<Vec3> u = base;
        append(u, rotated(base, a, 0.0));
        const double s = hull::sphericity(u);
        if (s > best_sph) {
            best_sph = s;
            best_angle = a;
        }
    }
    std::vector<Vec3> u = base;
    append(u, rotated(base, best_angle, 0.0));
    if (angle_out) *angle_out = best_angle;
    return u;
}

// Four snub cubes: identity, Rz(a), Rx(b), Rz(a) Rx(b), with (a, b) grid
// searched for maximal sphericity.
static std::vector<Vec3> snub_union96(double* a_out, double* b_out) {
    const auto base = snub_cube24();
    double best_a = 0.0, best_b = 0.0, best_sph = -1.0;
    for (int a = 1; a < 90; a += 1) {
        const auto ra = rotated(base, a, 0.0);
        for (int b = 1; b < 90; b += 1) {
            std::vector<Vec3> u = base;
            append(u, ra);
            append(u, rotated(base, 0.0, b));
            append(u, rotated(ra, 0.0, b));
            const double s = hull::sphericity(u);
            if (s > best_sph) {
                best_sph = s;
                best_a = a;
                best_b = b;
            }
        }
    }
    std::vector<Vec3> u = base;
    append(u, rotated(base, best_a, 0.0));
    append(u, rotated(base, 0.0, best_b));
    append(u, rotated(rotated(base, best_a, 0.0), 0.0, best_b));
    if (a_out) *a_out = best_a;
    if (b_out) *b_out = best_b;
    return u;
}

// Greedy nearest-direction pairing with fixed per-coarse capacity; ties break
// toward the lower fine index, then the lower coarse index.
static std::vector<int> assign_with_capacity(const std::vector<Vec3>& fine,
                                             const std::vector<Vec3>& coarse) {
    const int cap = static_cast<int>(fine.size() / coarse.size());
    struct Pair {
        double angle;
        int f, c;
    };
    std::vector<Pair> pairs;
    pairs.reserve(fine.size() * coarse.size());
    for (int f = 0; f < static_cast<int>(fine.size()); ++f)
        for (int c = 0; c < static_cast<int>(coarse.size()); ++c)
            pairs.push_back({angle_between_deg(fine[f], coarse[c]), f, c});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.angle != b.angle) return a.angle < b.angle;
        if (a.f != b.f) return a.f < b.f;
        return a.c < b.c;
    });
    std::vector<int> map(fine.size(), -1);
    std::vector<int> load(coarse.size(), 0);
    size_t assigned = 0;
    for (const Pair& p : pairs) {
        if (assigned == fine.size()) break;
        if (map[p.f] >= 0 || load[p.c] >= cap) continue;
        map[p.f] = p.c;
        ++load[p.c];
        ++assigned;
    }
    return map;
}

void VrsLayout::validate() const {
    if (static_cast<int>(directions.size()) != n_vrs || static_cast<int>(gains.size()) != n_vrs)
        throw std::invalid_argument("VrsLayout: inconsistent sizes");
    if (assignment.size() != 96) throw std::invalid_argument("VrsLayout: assignment must cover 96 channels");
    for (const auto& d : directions)
        if (std::abs(d.norm() - 1.0) > 1e-9) throw std::invalid_argument("VrsLayout: direction not unit");
    for (double g : gains)
        if (!(g >= 0.0)) throw std::invalid_argument("VrsLayout: gains must be >= 0");
    std::vector<int> load(n_vrs, 0);
    for (int c : assignment) {
        if (c < 0 || c >= n_vrs) throw std::invalid_argument("VrsLayout: assignment out of range");
        ++load[c];
    }
    for (int l : load)
        if (l != 96 / n_vrs) throw std::invalid_argument("VrsLayout: unbalanced assignment");
}

namespace {

struct VrsLevels {
    std::vector<std::vector<Vec3>> dirs;   // 96, 48, 24, 12, 6
    std::vector<std::vector<int>> chain;   // composed assignment 96 -> level
    std::string meta;
};

const VrsLevels& vrs_levels() {
    static const VrsLevels levels = [] {
        VrsLevels lv;
        double rz48 = 0.0, rz96 = 0.0, rx96 = 0.0;
        lv.dirs = {snub_union96(&rz96, &rx96), snub_union48(&rz48), snub_cube24(),
                   cuboctahedron12(), axes6()};
        lv.meta = "snub96 rz=" + std::to_string(rz96) + " rx=" + std::to_string(rx96) +
                  "; snub48 rz=" + std::to_string(rz48);

        // Halving chain 96 -> 48 -> 24 -> 12 -> 6; each step pairs two
        // channels of the previous level.
        std::vector<int> composed(96);
        for (int i = 0; i < 96; ++i) composed[i] = i;
        lv.chain.push_back(composed);
        for (size_t level = 0; level + 1 < lv.dirs.size(); ++level) {
            const auto step = assign_with_capacity(lv.dirs[level], lv.dirs[level + 1]);
            for (int i = 0; i < 96; ++i) composed[i] = step[composed[i]];
            lv.chain.push_back(composed);
        }
        return lv;
    }();
    return levels;
}

}  // namespace

VrsLayout build_vrs_layout(int n_vrs) {
    static const int kSupported[] = {6, 12, 24, 48, 96};
    if (std::find(std::begin(kSupported), std::end(kSupported), n_vrs) == std::end(kSupported))
        throw std::invalid_argument("build_vrs_layout: n_vrs must be one of 6, 12, 24, 48, 96");

    const VrsLevels& lv = vrs_levels();
    size_t level = 0;
    while (static_cast<int>(lv.dirs[level].size()) != n_vrs) ++level;

    VrsLayout out;
    out.n_vrs = n_vrs;
    out.directions = lv.dirs[level];
    out.gains.assign(n_vrs, 1.0);
    out.assignment = lv.chain[level];
    out.meta = lv.meta;
    out.validate();
    return out;
}

double sphericity(const std::vector<Vec3>& points) { return hull::sphericity(points); }

// ---------------------------------------------------------------------------
// Corridor field of view

double corridor_fov_deg(const Placement& p, const Room& room) {
    p.validate(room);
    int wall = 0;
    double worst = -1.0;
    for (int w = 0; w < 6; ++w) {
        double mean = 0.0;
        for (double a : room.surfaces[w].absorption) mean += a;
        mean /= dsp::kNumBands;
        if (mean > worst) {
            worst = mean;
            wall = w;
        }
    }
    const Vec3& r = p.receiver_pos;
    double ex, ey0, ey1;  // horizontal coordinates of the wall's vertical edges
    switch (wall) {
        case kWallXLow:
            ex = 0.0 - r.x, ey0 = 0.0 - r.y, ey1 = room.dims.y - r.y;
            break;
        case kWallXHigh:
            ex = room.dims.x - r.x, ey0 = 0.0 - r.y, ey1 = room.dims.y - r.y;
            break;
        case kWallYLow:
            ex = 0.0 - r.y, ey0 = 0.0 - r.x, ey1 = room.dims.x - r.x;
            break;
        case kWallYHigh:
            ex = room.dims.y - r.y, ey0 = 0.0 - r.x, ey1 = room.dims.x - r.x;
            break;
        default:
            throw std::invalid_argument("corridor_fov: most absorbent surface is floor/ceiling");
    }
    const double dot = ex * ex + ey0 * ey1;
    const double n0 = std::hypot(ex, ey0), n1 = std::hypot(ex, ey1);
    return rad2deg(std::acos(std::clamp(dot / (n0 * n1), -1.0, 1.0)));
}

// ---------------------------------------------------------------------------
// Fixtures

static Bands flat_bands(double v) {
    Bands b{};
    b.fill(v);
    return b;
}

// Uniform absorption realizing the given RT60 endpoints (geometric
// interpolation across the octave bands) through the Eyring relation.
static Bands absorption_from_rt60(const Vec3& dims, double rt_low, double rt_high) {
    const double volume = dims.x * dims.y * dims.z;
    const double surface = 2.0 * (dims.x * dims.y + dims.x * dims.z + dims.y * dims.z);
    Bands a{};
    for (int b = 0; b < dsp::kNumBands; ++b) {
        const double t = static_cast<double>(b) / (dsp::kNumBands - 1);
        const double rt = rt_low * std::pow(rt_high / rt_low, t);
        a[b] = 1.0 - std::exp(-0.161 * volume / (surface * rt));
    }
    return a;
}

static Room uniform_room(const Vec3& dims, const Bands& absorption) {
    Room room;
    room.dims = dims;
    for (auto& s : room.surfaces) s.absorption = absorption;
    return room;
}

static Fixture corridor_fixture(const std::string& name, double h, double yaw) {
    Room room;
    room.dims = {24.0, 8.0, 6.0};
    Bands reflective{};
    for (int b = 0; b < dsp::kNumBands; ++b)
        reflective[b] = 0.01 + (0.11 - 0.01) * b / (dsp::kNumBands - 1);
    for (auto& s : room.surfaces) s.absorption = reflective;
    room.surfaces[kWallXLow].absorption = flat_bands(0.99);

    Placement pl;
    pl.receiver_pos = {h, 1.33, 1.8};
    pl.source_pos = {h, 1.33 + 5.33, 1.8};
    pl.receiver_yaw_deg = yaw;
    return {room, pl, name};
}

Fixture fixture(const std::string& name) {
    if (name == "Aula" || name == "Aula/Rec1" || name == "Aula/Rec2") {
        const Vec3 dims{30.0, 12.0, 10.0};
        Room room = uniform_room(dims, absorption_from_rt60(dims, 7.2, 1.5));
        Placement pl;
        pl.source_pos = {7.0, 6.0, 1.7};
        pl.receiver_pos = name == "Aula/Rec2" ? Vec3{20.01, 6.0, 1.7} : Vec3{9.72, 6.0, 1.7};
        return {room, pl, name};
    }
    if (name == "Laboratory") {
        const Vec3 dims{4.97, 4.12, 3.0};
        Room room = uniform_room(dims, absorption_from_rt60(dims, 0.4, 0.4));
        Placement pl;
        pl.source_pos = {1.6, 2.06, 1.7};
        pl.receiver_pos = {3.3, 2.06, 1.7};
        return {room, pl, name};
    }
    if (name == "Corridor/A") return corridor_fixture(name, 0.18, 0.0);
    if (name == "Corridor/Ar") return corridor_fixture(name, 0.18, 60.0);
    if (name == "Corridor/B") return corridor_fixture(name, 1.87, 0.0);
    if (name == "Corridor/C") return corridor_fixture(name, 4.77, 0.0);
    if (name == "Corridor/D") return corridor_fixture(name, 14.93, 0.0);
    if (name == "Staircase") {
        const Vec3 dims{2.98, 6.83, 12.71};
        Room room = uniform_room(dims, absorption_from_rt60(dims, 5.3, 2.6));
        Placement pl;
        pl.source_pos = {1.49, 2.4, 1.72};
        pl.receiver_pos = {1.49, 4.4, 1.72};
        return {room, pl, name};
    }
    throw std::invalid_argument("fixture: unknown name '" + name + "'");
}

std::vector<std::string> fixture_names() {
    return {"Aula/Rec1", "Aula/Rec2", "Laboratory", "Corridor/A", "Corridor/Ar",
            "Corridor/B", "Corridor/C", "Corridor/D", "Staircase"};
}

}  // namespace vrsverb::scene
