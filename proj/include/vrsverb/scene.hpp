// Rooms, source/receiver placements, loudspeaker arrays and VRS direction
// layouts, including the built-in room fixtures.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "vrsverb/dsp.hpp"
#include "vrsverb/vec.hpp"

namespace vrsverb::scene {

using Bands = dsp::BandGains;  // one value per octave band 125 Hz .. 8 kHz

// Wall order used everywhere a room surface is indexed.
enum WallIndex { kWallXLow = 0, kWallXHigh, kWallYLow, kWallYHigh, kWallZLow, kWallZHigh };

struct Surface {
    Bands absorption{};
};

struct Room {
    Vec3 dims;                        // meters, x = length, y = width, z = height
    std::array<Surface, 6> surfaces;  // -x, +x, -y, +y, floor, ceiling
    double speed_of_sound = 343.0;

    double volume() const { return dims.x * dims.y * dims.z; }
    double wall_area(int wall) const;
    double total_surface() const;
    void validate() const;
};

struct Placement {
    Vec3 source_pos;
    Vec3 receiver_pos;
    // 0 = facing the source, positive angles rotate clockwise seen from above.
    double receiver_yaw_deg = 0.0;

    void validate(const Room& room) const;
};

// Room-frame azimuth of the listener's facing direction (yaw applied).
double listener_facing_azimuth_deg(const Placement& p);

struct Speaker {
    Vec3 dir;       // unit direction from the array center
    double radius;  // meters
};

struct LoudspeakerArray {
    std::vector<Speaker> speakers;
    std::string label;

    void validate() const;
    LoudspeakerArray with_radius(double radius) const;
};

struct VrsLayout {
    int n_vrs = 0;
    std::vector<Vec3> directions;  // unit, room aligned
    std::vector<double> gains;     // linear amplitude per VRS (1 = isotropic)
    std::vector<int> assignment;   // 96 entries, fine FDN channel -> coarse index
    std::string meta;

    void validate() const;
};

// The 86-channel playback array: rings at -60/-30/0/30/60 deg elevation with
// 60/30/7.5/30/60 deg azimuth steps plus both poles.
LoudspeakerArray build_ring_array(double radius = 2.5);

LoudspeakerArray build_fibonacci_array(int n, double radius);
std::vector<Vec3> fibonacci_directions(int n);

// Supported sizes: 6 (axes), 12 (cuboctahedron), 24 (snub cube), 48/96
// (unions of rotated snub cubes, rotation angles grid searched for maximal
// minimum pairwise angle).
VrsLayout build_vrs_layout(int n_vrs);

double sphericity(const std::vector<Vec3>& points);

double min_pairwise_angle_deg(const std::vector<Vec3>& dirs);

// Horizontal field of view of the most absorbent wall seen from the receiver.
double corridor_fov_deg(const Placement& p, const Room& room);

struct Fixture {
    Room room;
    Placement placement;
    std::string name;
};

// Known names: Aula, Aula/Rec1, Aula/Rec2, Laboratory, Corridor/A, Corridor/Ar,
// Corridor/B, Corridor/C, Corridor/D, Staircase.
Fixture fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace vrsverb::scene
