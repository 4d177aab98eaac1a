#include "vrsverb/ism.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vrsverb/io.hpp"

namespace vrsverb::ism {

std::vector<Reflection> compute_reflections(const scene::Room& room,
                                            const scene::Placement& placement, int max_order) {
    room.validate();
    placement.validate(room);
    if (max_order < 0) throw std::invalid_argument("compute_reflections: max_order must be >= 0");
    if ((placement.source_pos - placement.receiver_pos).norm() < 1e-3)
        throw std::invalid_argument("compute_reflections: source coincides with receiver");

    const Vec3 s = placement.source_pos;
    const Vec3 r = placement.receiver_pos;
    const Vec3 L = room.dims;

    // Amplitude reflection factor sqrt(1 - alpha) per wall and band.
    std::array<scene::Bands, 6> beta;
    for (int w = 0; w < 6; ++w)
        for (int b = 0; b < dsp::kNumBands; ++b)
            beta[w][b] = std::sqrt(1.0 - room.surfaces[w].absorption[b]);

    std::vector<Reflection> out;
    const int m_max = max_order;  // |2m - q| <= order bounds m well within this
    for (int mx = -m_max; mx <= m_max; ++mx)
        for (int q = 0; q <= 1; ++q) {
            const int ox = std::abs(2 * mx - q);
            if (ox > max_order) continue;
            for (int my = -m_max; my <= m_max; ++my)
                for (int j = 0; j <= 1; ++j) {
                    const int oy = std::abs(2 * my - j);
                    if (ox + oy > max_order) continue;
                    for (int mz = -m_max; mz <= m_max; ++mz)
                        for (int k = 0; k <= 1; ++k) {
                            const int oz = std::abs(2 * mz - k);
                            const int order = ox + oy + oz;
                            if (order > max_order) continue;

                            Reflection refl;
                            refl.order = order;
                            refl.image_pos = {(1 - 2 * q) * s.x + 2.0 * mx * L.x,
                                              (1 - 2 * j) * s.y + 2.0 * my * L.y,
                                              (1 - 2 * k) * s.z + 2.0 * mz * L.z};
                            const Vec3 d = refl.image_pos - r;
                            refl.distance = d.norm();
                            refl.delay = refl.distance / room.speed_of_sound;
                            refl.direction = d.normalized();

                            const int hits[6] = {std::abs(mx - q), std::abs(mx),
                                                 std::abs(my - j), std::abs(my),
                                                 std::abs(mz - k), std::abs(mz)};
                            for (int b = 0; b < dsp::kNumBands; ++b) {
                                double g = 1.0 / refl.distance;
                                for (int w = 0; w < 6; ++w)
                                    if (hits[w] > 0) g *= std::pow(beta[w][b], hits[w]);
                                refl.band_gains[b] = g;
                            }
                            out.push_back(refl);
                        }
                }
        }

    std::stable_sort(out.begin(), out.end(),
                     [](const Reflection& a, const Reflection& b) { return a.delay < b.delay; });
    return out;
}

std::vector<Reflection> last_order_arrivals(const std::vector<Reflection>& reflections) {
    if (reflections.empty()) throw std::invalid_argument("last_order_arrivals: empty input");
    int max_order = 0;
    for (const auto& r : reflections) max_order = std::max(max_order, r.order);
    if (max_order < 1)
        throw std::invalid_argument("last_order_arrivals: no reflections above the direct sound");
    std::vector<Reflection> out;
    for (const auto& r : reflections)
        if (r.order == max_order) out.push_back(r);
    return out;
}

std::string reflections_to_csv(const std::vector<Reflection>& reflections) {
    io::CsvWriter csv({"order", "delay_s", "distance_m", "azimuth_deg", "elevation_deg", "g125",
                       "g250", "g500", "g1000", "g2000", "g4000", "g8000"});
    for (const auto& r : reflections) {
        std::vector<std::string> row = {std::to_string(r.order), io::format_g9(r.delay),
                                        io::format_g9(r.distance), io::format_g9(azimuth_deg(r.direction)),
                                        io::format_g9(elevation_deg(r.direction))};
        for (double g : r.band_gains) row.push_back(io::format_g9(g));
        csv.add_row(row);
    }
    return csv.text();
}

}  // namespace vrsverb::ism
