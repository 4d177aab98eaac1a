// Shoebox image source engine: specular reflections as delayed,
// band-attenuated arrivals with incidence directions.
#pragma once

#include <string>
#include <vector>

#include "vrsverb/scene.hpp"

namespace vrsverb::ism {

struct Reflection {
    int order = 0;             // number of wall hits, 0 = direct sound
    Vec3 image_pos;            // image source position, room coordinates
    double delay = 0.0;        // seconds
    double distance = 0.0;     // meters
    scene::Bands band_gains{}; // linear amplitude per band, includes 1/r
    Vec3 direction;            // unit, from receiver toward the image
};

// All image sources with at most max_order wall hits, sorted by delay.
// Throws when source and receiver are closer than 1 mm.
std::vector<Reflection> compute_reflections(const scene::Room& room,
                                            const scene::Placement& placement, int max_order);

// The subset with the highest reflection order present (the FDN feed).
// Throws when the input holds nothing above the direct sound.
std::vector<Reflection> last_order_arrivals(const std::vector<Reflection>& reflections);

// CSV export: order, delay_s, distance_m, azimuth_deg, elevation_deg, g125..g8000.
std::string reflections_to_csv(const std::vector<Reflection>& reflections);

}  // namespace vrsverb::ism
