// Incremental 3-D convex hull for small point sets (loudspeaker layouts,
// VRS polyhedra). Input points are deterministically joggled to break exact
// coplanarity; volume/area are evaluated on the original coordinates.
#pragma once

#include <array>
#include <vector>

#include "vrsverb/vec.hpp"

namespace vrsverb::hull {

struct ConvexHull {
    std::vector<Vec3> points;                 // original, un-joggled
    std::vector<std::array<int, 3>> faces;    // outward-oriented triangles

    double volume() const;
    double surface_area() const;
};

// Throws std::invalid_argument for fewer than 4 points or (near) coplanar
// input.
ConvexHull convex_hull(const std::vector<Vec3>& pts);

// Wadell sphericity pi^(1/3) (6V)^(2/3) / A of the convex hull.
double sphericity(const std::vector<Vec3>& pts);

}  // namespace vrsverb::hull
