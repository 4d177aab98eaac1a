// VBAP spatialization of discrete reflections and VRS channels onto a
// loudspeaker array, assembling multichannel room impulse responses.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "vrsverb/fdn.hpp"
#include "vrsverb/ism.hpp"
#include "vrsverb/scene.hpp"

namespace vrsverb::render {

struct PanningGains {
    std::array<int, 3> speaker_indices{-1, -1, -1};
    std::array<double, 3> gains{0.0, 0.0, 0.0};
    int count = 0;         // 1 when the direction coincides with a speaker
    bool fallback = false; // no containing triplet; nearest one was used
};

struct Triangulation {
    std::vector<Vec3> directions;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Eigen::Matrix3d> inverses;  // of the speaker-direction column matrix
};

// Convex-hull triangulation of the speaker directions. Throws for fewer than
// 4 speakers or a coplanar array.
Triangulation triangulate(const scene::LoudspeakerArray& array);

// Unit-power VBAP gains for a direction; gains below -1e-9 flag a fallback,
// tiny negatives are clamped to zero.
PanningGains pan(const Vec3& direction, const Triangulation& tri);

struct Mrir {
    std::vector<Signal> channels;  // one per loudspeaker
    double sample_rate = 0.0;
    std::string meta;
};

// Reflections become band-filtered fractionally delayed taps panned to their
// arrival direction; each VRS channel is panned statically (layout gains
// applied here). Directions must already be in the array/listener frame.
Mrir assemble_mrir(const std::vector<ism::Reflection>& reflections,
                   const fdn::VrsSignals& vrs_signals, const scene::VrsLayout& layout,
                   const scene::LoudspeakerArray& array, double sample_rate);

using dsp::fractional_delay;

// Full render pipeline: ISM order 3, FDN with Eyring targets, anisotropic VRS
// weights, downmix, VBAP assembly in the listener frame.
struct MrirResult {
    Mrir mrir;
    scene::Bands rt60_target{};
    std::vector<double> vrs_gains;
    double fdn_scale = 1.0;
    double fdn_filter_residual_db = 0.0;
    int reflection_count = 0;
    double transition_s = 0.0;
    double target_edc_db = 0.0;  // ISM-fit EDC at the transition, re total ISM energy
};
MrirResult simulate_mrir(const scene::Room& room, const scene::Placement& placement, int n_vrs,
                         const scene::LoudspeakerArray& array, double sample_rate, uint64_t seed,
                         double duration_s = 0.0);

}  // namespace vrsverb::render
