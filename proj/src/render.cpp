#include "vrsverb/render.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vrsverb/hull.hpp"

namespace vrsverb::render {

Triangulation triangulate(const scene::LoudspeakerArray& array) {
    array.validate();
    if (array.speakers.size() < 4)
        throw std::invalid_argument("triangulate: need at least 4 speakers");

    Triangulation tri;
    tri.directions.reserve(array.speakers.size());
    for (const auto& s : array.speakers) tri.directions.push_back(s.dir);

    const auto h = hull::convex_hull(tri.directions);
    tri.triangles = h.faces;
    tri.inverses.reserve(tri.triangles.size());
    for (const auto& f : tri.triangles) {
        Eigen::Matrix3d m;
        for (int c = 0; c < 3; ++c) {
            const Vec3& d = tri.directions[f[c]];
            m(0, c) = d.x;
            m(1, c) = d.y;
            m(2, c) = d.z;
        }
        if (std::abs(m.determinant()) < 1e-12)
            throw std::invalid_argument("triangulate: degenerate triplet");
        tri.inverses.push_back(m.inverse());
    }
    return tri;
}

PanningGains pan(const Vec3& direction, const Triangulation& tri) {
    const Vec3 p = direction.normalized();

    PanningGains out;
    // Coincident speaker: single-channel gain one.
    for (size_t i = 0; i < tri.directions.size(); ++i) {
        if (p.dot(tri.directions[i]) >= 1.0 - 1e-12) {
            out.speaker_indices[0] = static_cast<int>(i);
            out.gains[0] = 1.0;
            out.count = 1;
            return out;
        }
    }

    int best = -1;
    double best_min = -2.0;
    Eigen::Vector3d best_g;
    const Eigen::Vector3d pv(p.x, p.y, p.z);
    for (size_t t = 0; t < tri.triangles.size(); ++t) {
        const Eigen::Vector3d g = tri.inverses[t] * pv;
        const double mn = g.minCoeff();
        if (mn > best_min) {
            best_min = mn;
            best = static_cast<int>(t);
            best_g = g;
        }
    }
    if (best < 0) throw std::invalid_argument("pan: empty triangulation");

    out.count = 3;
    out.fallback = best_min < -1e-9;
    double norm = 0.0;
    for (int c = 0; c < 3; ++c) {
        out.speaker_indices[c] = tri.triangles[best][c];
        out.gains[c] = std::max(best_g(c), 0.0);
        norm += out.gains[c] * out.gains[c];
    }
    norm = std::sqrt(norm);
    for (double& g : out.gains) g /= norm;
    return out;
}

Mrir assemble_mrir(const std::vector<ism::Reflection>& reflections,
                   const fdn::VrsSignals& vrs_signals, const scene::VrsLayout& layout,
                   const scene::LoudspeakerArray& array, double sample_rate) {
    if (reflections.empty()) throw std::invalid_argument("assemble_mrir: no reflections");
    if (vrs_signals.n_vrs != layout.n_vrs)
        throw std::invalid_argument("assemble_mrir: layout / VRS count mismatch");
    if (vrs_signals.sample_rate != sample_rate)
        throw std::invalid_argument("assemble_mrir: sample rate mismatch");

    const Triangulation tri = triangulate(array);

    double max_delay = 0.0;
    for (const auto& r : reflections) max_delay = std::max(max_delay, r.delay);
    size_t len = static_cast<size_t>(max_delay * sample_rate) + 256 + dsp::kFracDelayTaps;
    for (const auto& s : vrs_signals.signals) len = std::max(len, s.size());

    Mrir out;
    out.sample_rate = sample_rate;
    out.channels.assign(array.speakers.size(), Signal(len, 0.0f));

    // Early reflections: band FIR + fractional delay, panned per arrival.
    for (const auto& r : reflections) {
        const auto fir = dsp::design_band_fir(r.band_gains, sample_rate);
        Signal tap(fir.size());
        for (size_t i = 0; i < fir.size(); ++i) tap[i] = static_cast<float>(fir[i]);
        const double delay_samples =
            r.delay * sample_rate - static_cast<double>(fir.size() / 2);
        const PanningGains g = pan(r.direction, tri);
        for (int c = 0; c < g.count; ++c) {
            if (g.gains[c] == 0.0) continue;
            Signal& ch = out.channels[g.speaker_indices[c]];
            dsp::add_delayed(tap.data(), tap.size(), ch.data(), ch.size(), delay_samples,
                             static_cast<float>(g.gains[c]));
        }
    }

    // Late field: VRS channels with their layout gains, statically panned.
    for (int v = 0; v < layout.n_vrs; ++v) {
        const PanningGains g = pan(layout.directions[v], tri);
        const Signal& src = vrs_signals.signals[v];
        for (int c = 0; c < g.count; ++c) {
            const float w = static_cast<float>(g.gains[c] * layout.gains[v]);
            if (w == 0.0f) continue;
            Signal& ch = out.channels[g.speaker_indices[c]];
            for (size_t n = 0; n < src.size(); ++n) ch[n] += w * src[n];
        }
    }
    return out;
}

MrirResult simulate_mrir(const scene::Room& room, const scene::Placement& placement, int n_vrs,
                         const scene::LoudspeakerArray& array, double sample_rate, uint64_t seed,
                         double duration_s) {
    room.validate();
    placement.validate(room);

    MrirResult res;
    const auto reflections = ism::compute_reflections(room, placement, 3);
    res.reflection_count = static_cast<int>(reflections.size());

    scene::VrsLayout layout = scene::build_vrs_layout(n_vrs);
    layout.gains = fdn::anisotropic_gains(room, placement, layout);
    res.vrs_gains = layout.gains;

    const fdn::FdnConfig config = fdn::make_config(room, sample_rate, seed);
    res.rt60_target = config.band_rt60;
    res.fdn_filter_residual_db = fdn::design_line_filters(config).max_residual_db;

    const auto fine_layout = scene::build_vrs_layout(fdn::kNumLines);
    auto injections =
        fdn::route_arrivals(ism::last_order_arrivals(reflections), fine_layout.directions);

    const auto cal = fdn::calibrate_injection_scale(reflections, config, injections);
    res.fdn_scale = cal.scale;
    res.transition_s = cal.transition_s;
    res.target_edc_db = cal.target_edc_db;
    for (auto& inj : injections)
        for (double& g : inj.band_gains) g *= cal.scale;

    double rt_max = 0.0;
    for (double t : config.band_rt60) rt_max = std::max(rt_max, t);
    if (duration_s <= 0.0) duration_s = cal.transition_s + 0.75 * rt_max + 0.3;

    const auto fine = fdn::run_fdn(config, injections, nullptr, duration_s);
    const fdn::VrsSignals vrs = fdn::downmix(fine, layout, sample_rate);

    // Rotate room-frame directions into the listener/array frame.
    const double facing = scene::listener_facing_azimuth_deg(placement);
    auto rotated_reflections = reflections;
    for (auto& r : rotated_reflections) r.direction = rotate_z(r.direction, -facing);
    scene::VrsLayout rotated_layout = layout;
    for (auto& d : rotated_layout.directions) d = rotate_z(d, -facing);

    res.mrir = assemble_mrir(rotated_reflections, vrs, rotated_layout, array, sample_rate);
    res.mrir.meta = "n_vrs=" + std::to_string(n_vrs) + " seed=" + std::to_string(seed) +
                    " fs=" + std::to_string(sample_rate) + " " + layout.meta;
    return res;
}

}  // namespace vrsverb::render
