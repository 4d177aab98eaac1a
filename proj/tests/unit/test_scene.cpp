#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "vrsverb/scene.hpp"

using namespace vrsverb;
using namespace vrsverb::scene;

TEST_CASE("ring array: 86 speakers, 48 horizontal, both poles") {
    const auto a = build_ring_array();
    CHECK(a.speakers.size() == 86);

    int horizontal = 0, pole_up = 0, pole_down = 0;
    for (const auto& s : a.speakers) {
        const double el = elevation_deg(s.dir);
        if (std::abs(el) < 1e-9) ++horizontal;
        if (std::abs(el - 90.0) < 1e-9) ++pole_up;
        if (std::abs(el + 90.0) < 1e-9) ++pole_down;
        CHECK(s.radius == doctest::Approx(2.5));
    }
    CHECK(horizontal == 48);
    CHECK(pole_up == 1);
    CHECK(pole_down == 1);
}

TEST_CASE("ring array construction is deterministic") {
    const auto a = build_ring_array(), b = build_ring_array();
    REQUIRE(a.speakers.size() == b.speakers.size());
    for (size_t i = 0; i < a.speakers.size(); ++i)
        CHECK((a.speakers[i].dir - b.speakers[i].dir).norm() == 0.0);
}

TEST_CASE("fibonacci array: counts, radii, spread") {
    const auto a = build_fibonacci_array(87, 1.25);
    CHECK(a.speakers.size() == 87);
    for (const auto& s : a.speakers) {
        CHECK(std::abs(s.dir.norm() - 1.0) < 1e-9);
        CHECK(s.radius == doctest::Approx(1.25));
    }

    std::vector<Vec3> dirs;
    for (const auto& s : a.speakers) dirs.push_back(s.dir);
    const double min_angle = min_pairwise_angle_deg(dirs);
    // Asymptotic best packing angle sqrt(8 pi / (sqrt(3) n)).
    const double ideal = rad2deg(std::sqrt(8.0 * kPi / (std::sqrt(3.0) * 87.0)));
    CHECK(min_angle > 0.8 * ideal);

    const auto t = build_fibonacci_array(4, 1.0);
    std::vector<Vec3> tdirs;
    for (const auto& s : t.speakers) tdirs.push_back(s.dir);
    CHECK(min_pairwise_angle_deg(tdirs) > 60.0);

    CHECK_THROWS(build_fibonacci_array(3, 1.0));
}

TEST_CASE("vrs layout 6: the coordinate axes") {
    const auto l = build_vrs_layout(6);
    REQUIRE(l.directions.size() == 6);
    for (const auto& d : l.directions) {
        int on_axis = 0;
        if (std::abs(std::abs(d.x) - 1.0) < 1e-12) ++on_axis;
        if (std::abs(std::abs(d.y) - 1.0) < 1e-12) ++on_axis;
        if (std::abs(std::abs(d.z) - 1.0) < 1e-12) ++on_axis;
        CHECK(on_axis == 1);
    }
    // negation closure
    for (const auto& d : l.directions) {
        bool found = false;
        for (const auto& e : l.directions)
            if ((d + e).norm() < 1e-12) found = true;
        CHECK(found);
    }
}

TEST_CASE("vrs layout 12: cuboctahedron, closed under negation") {
    const auto l = build_vrs_layout(12);
    REQUIRE(l.directions.size() == 12);
    for (const auto& d : l.directions) {
        // one zero component, two at 1/sqrt(2)
        std::vector<double> mags = {std::abs(d.x), std::abs(d.y), std::abs(d.z)};
        std::sort(mags.begin(), mags.end());
        CHECK(mags[0] < 1e-12);
        CHECK(mags[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        bool found = false;
        for (const auto& e : l.directions)
            if ((d + e).norm() < 1e-12) found = true;
        CHECK(found);
    }
}

TEST_CASE("vrs layout 24: snub cube with 4 directions per room surface") {
    const auto l = build_vrs_layout(24);
    REQUIRE(l.directions.size() == 24);
    // all vertices on the unit sphere, vertex-transitive spread
    for (const auto& d : l.directions) CHECK(std::abs(d.norm() - 1.0) < 1e-12);

    int sextant[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& d : l.directions) {
        const double ax = std::abs(d.x), ay = std::abs(d.y), az = std::abs(d.z);
        if (ax >= ay && ax >= az)
            ++sextant[d.x > 0 ? 0 : 1];
        else if (ay >= ax && ay >= az)
            ++sextant[d.y > 0 ? 2 : 3];
        else
            ++sextant[d.z > 0 ? 4 : 5];
    }
    for (int c : sextant) CHECK(c == 4);

    CHECK(sphericity(l.directions) == doctest::Approx(0.965).epsilon(0.01));
}

TEST_CASE("vrs layouts 48 and 96: spread unions of snub cubes") {
    const auto l48 = build_vrs_layout(48);
    const auto l96 = build_vrs_layout(96);
    CHECK(l48.directions.size() == 48);
    CHECK(l96.directions.size() == 96);
    // rotations must not collapse any pair
    CHECK(min_pairwise_angle_deg(l48.directions) > 6.5);
    CHECK(min_pairwise_angle_deg(l96.directions) > 5.5);
    CHECK(sphericity(l48.directions) > sphericity(build_vrs_layout(24).directions));
}

TEST_CASE("vrs sphericity: octahedron value for 6, near-sphere for 96") {
    CHECK(std::abs(sphericity(build_vrs_layout(6).directions) - 0.845584) < 0.001);
    const double s96 = sphericity(build_vrs_layout(96).directions);
    CHECK(s96 >= 0.985);
    CHECK(s96 <= 0.995);
}

TEST_CASE("vrs assignment: balanced, surjective, composed through halvings") {
    for (int n : {6, 12, 24, 48, 96}) {
        const auto l = build_vrs_layout(n);
        REQUIRE(l.assignment.size() == 96);
        std::vector<int> load(n, 0);
        for (int c : l.assignment) {
            REQUIRE(c >= 0);
            REQUIRE(c < n);
            ++load[c];
        }
        for (int c : load) CHECK(c == 96 / n);
    }
    CHECK_THROWS(build_vrs_layout(10));
}

TEST_CASE("vrs layout construction is deterministic") {
    const auto a = build_vrs_layout(96), b = build_vrs_layout(96);
    for (size_t i = 0; i < a.directions.size(); ++i)
        CHECK((a.directions[i] - b.directions[i]).norm() == 0.0);
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("corridor field of view matches the fixture table") {
    const auto a = fixture("Corridor/A");
    CHECK(corridor_fov_deg(a.placement, a.room) == doctest::Approx(170.0).epsilon(2.0 / 170.0));
    const auto d = fixture("Corridor/D");
    CHECK(corridor_fov_deg(d.placement, d.room) == doctest::Approx(30.0).epsilon(2.0 / 30.0));
    const auto b = fixture("Corridor/B");
    CHECK(corridor_fov_deg(b.placement, b.room) == doctest::Approx(110.0).epsilon(2.0 / 110.0));
    const auto c = fixture("Corridor/C");
    CHECK(corridor_fov_deg(c.placement, c.room) == doctest::Approx(70.0).epsilon(2.0 / 70.0));
}

TEST_CASE("corridor fov: equidistant receiver at half wall width sees 90 degrees") {
    auto f = fixture("Corridor/A");
    // wall width 8, receiver centered at y = 4, distance 4
    f.placement.receiver_pos = {4.0, 4.0, 1.8};
    f.placement.source_pos = {4.0, 6.0, 1.8};
    CHECK(corridor_fov_deg(f.placement, f.room) == doctest::Approx(90.0).epsilon(1e-9));
}

TEST_CASE("fixtures: corridor geometry and orientations") {
    const auto a = fixture("Corridor/A");
    CHECK(a.placement.receiver_pos.x == doctest::Approx(0.18));
    CHECK(a.placement.receiver_yaw_deg == 0.0);
    CHECK((a.placement.source_pos - a.placement.receiver_pos).norm() == doctest::Approx(5.33));

    const auto ar = fixture("Corridor/Ar");
    CHECK(ar.placement.receiver_yaw_deg == 60.0);

    // receiver faces the source (+y); rotating 60 degrees clockwise points
    // down the corridor
    CHECK(listener_facing_azimuth_deg(a.placement) == doctest::Approx(90.0));
    CHECK(listener_facing_azimuth_deg(ar.placement) == doctest::Approx(30.0));

    CHECK_THROWS(fixture("Ballroom"));
}

TEST_CASE("fixtures: all rooms validate and placements are inside") {
    for (const auto& name : fixture_names()) {
        const auto f = fixture(name);
        f.room.validate();
        f.placement.validate(f.room);
    }
}

TEST_CASE("corridor absorption: absorbent end wall and log-frequency ramp") {
    const auto f = fixture("Corridor/A");
    for (double a : f.room.surfaces[kWallXLow].absorption) CHECK(a == doctest::Approx(0.99));
    CHECK(f.room.surfaces[kWallYLow].absorption[0] == doctest::Approx(0.01));
    CHECK(f.room.surfaces[kWallYLow].absorption[6] == doctest::Approx(0.11));
    CHECK(f.room.surfaces[kWallYLow].absorption[3] == doctest::Approx(0.06));
}

TEST_CASE("sphericity rejects coplanar directions") {
    CHECK_THROWS(sphericity({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}}));
}
