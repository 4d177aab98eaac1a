// 96-channel feedback delay network: mutually incoherent late reverberation
// with per-band decay matched to target RT60, downmixed to the active VRS
// count and scaled by anisotropic solid-angle weights.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "vrsverb/dsp.hpp"
#include "vrsverb/ism.hpp"
#include "vrsverb/scene.hpp"

namespace vrsverb::fdn {

inline constexpr int kNumLines = 96;

struct FdnConfig {
    int n_lines = kNumLines;
    std::vector<int> delays;    // samples, pairwise coprime
    Eigen::MatrixXd feedback;   // orthogonal n_lines x n_lines
    scene::Bands band_rt60{};   // seconds
    double sample_rate = 44100.0;
    uint64_t seed = 0;

    void validate() const;
};

// Log-spaced delays in [min_s, max_s] nudged to pairwise coprime counts.
std::vector<int> make_delay_lengths(double sample_rate, int count = kNumLines,
                                    double min_s = 0.020, double max_s = 0.100);

// QR orthogonalization of a seeded Gaussian matrix, sign-fixed for
// reproducibility.
Eigen::MatrixXd random_orthogonal(int n, uint64_t seed);

FdnConfig make_config(const scene::Room& room, double sample_rate, uint64_t seed);

// Per band: 0.161 V / (-S ln(1 - mean absorption)); 0 when fully absorbent.
scene::Bands eyring_rt60(const scene::Room& room);

// One arrival injected into one delay line.
struct Injection {
    int line = 0;
    double delay_s = 0.0;
    scene::Bands band_gains{};  // linear amplitude, calibration included
};

// Route last-order ISM arrivals to the delay line whose fine (96-VRS layout)
// direction is angularly nearest; ties take the lowest line index.
std::vector<Injection> route_arrivals(const std::vector<ism::Reflection>& arrivals,
                                      const std::vector<Vec3>& fine_directions);

struct VrsSignals {
    int n_vrs = 0;
    std::vector<Signal> signals;
    double sample_rate = 0.0;
};

// Core delay-line network. Attenuation filters may be omitted entirely, which
// leaves the lossless orthogonal loop (used by the energy conservation
// checks).
class FdnProcessor {
public:
    FdnProcessor(const std::vector<int>& delays, const Eigen::MatrixXd& feedback,
                 std::vector<dsp::BiquadCascade> line_filters);

    int lines() const { return static_cast<int>(delays_.size()); }
    int max_block() const { return max_block_; }

    // in/out: lines x block matrices (row per line); block <= max_block().
    void process(const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& in,
                 Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& out);

    double state_energy() const;

private:
    std::vector<int> delays_;
    Eigen::MatrixXd feedback_;
    std::vector<dsp::BiquadCascade> filters_;
    std::vector<std::vector<double>> rings_;
    std::vector<int> heads_;
    int max_block_ = 0;
};

// Attenuation filters realizing g_i(b) = 10^(-3 m_i / (fs RT60_b)) per line.
struct LineFilterSet {
    std::vector<dsp::BiquadCascade> filters;
    double max_residual_db = 0.0;
};
LineFilterSet design_line_filters(const FdnConfig& config);

// Run the network for duration_s seconds. source == nullptr injects a unit
// impulse through each injection's band FIR; otherwise the source signal is
// convolved with it. Throws on unstable configurations (broadband gain >= 1).
std::vector<Signal> run_fdn(const FdnConfig& config, const std::vector<Injection>& inputs,
                            const Signal* source, double duration_s);

// Sum fine channels onto the coarse layout (halving-chain composition).
VrsSignals downmix(const std::vector<Signal>& fine, const scene::VrsLayout& layout,
                   double sample_rate);

// Injection scale making the broadband energy decay continuous across the
// ISM-to-FDN transition (fits the late ISM decay and matches the FDN EDC to
// its extension at the transition time).
struct Calibration {
    double scale = 1.0;
    double transition_s = 0.0;      // last ISM arrival + margin
    double target_edc_db = 0.0;     // ISM-fit EDC (dB re total ISM energy) at transition
};
Calibration calibrate_injection_scale(const std::vector<ism::Reflection>& reflections,
                                      const FdnConfig& config,
                                      const std::vector<Injection>& injections);

// Solid-angle absorption weights per VRS: sqrt of the mean (1 - alpha) over
// the rays assigned to each VRS direction, normalized to sum of squares =
// n_vrs.
std::vector<double> anisotropic_gains(const scene::Room& room, const scene::Placement& placement,
                                      const scene::VrsLayout& layout);

// Same weighting driven by a caller-supplied broadband absorption sampler.
std::vector<double> anisotropic_gains_sampled(
    const std::function<double(const Vec3&)>& alpha_of_direction,
    const std::vector<Vec3>& directions, int rays);

}  // namespace vrsverb::fdn
