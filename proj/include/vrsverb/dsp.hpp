// DSP building blocks: FFT, RBJ biquads, band-gain filter design, windowed
// sinc fractional delay, Schroeder decay fitting and Welch spectra.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "vrsverb/signal.hpp"

namespace vrsverb::dsp {

inline constexpr int kNumBands = 7;
inline constexpr std::array<double, kNumBands> kBandCenters = {125.0,  250.0,  500.0, 1000.0,
                                                               2000.0, 4000.0, 8000.0};
using BandGains = std::array<double, kNumBands>;

// ---------------------------------------------------------------------------
// FFT (iterative radix-2, in place; n must be a power of two)

void fft_inplace(std::complex<double>* a, int n, bool inverse = false);

// ---------------------------------------------------------------------------
// Biquads (RBJ cookbook)

struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;
    double z1 = 0.0, z2 = 0.0;

    double process(double x) {
        const double y = b0 * x + z1;
        z1 = b1 * x - a1 * y + z2;
        z2 = b2 * x - a2 * y;
        return y;
    }
    void reset() { z1 = z2 = 0.0; }
    std::complex<double> response(double freq_hz, double sample_rate) const;
};

Biquad peaking_eq(double fc, double sample_rate, double q, double gain_db);
Biquad low_shelf(double fc, double sample_rate, double gain_db);
Biquad high_shelf(double fc, double sample_rate, double gain_db);
Biquad bandpass(double fc, double sample_rate, double q);  // 0 dB peak gain

struct BiquadCascade {
    std::vector<Biquad> sections;

    double process(double x) {
        for (auto& s : sections) x = s.process(x);
        return x;
    }
    void reset() {
        for (auto& s : sections) s.reset();
    }
    double magnitude_db(double freq_hz, double sample_rate) const;
};

// Graphic-EQ style fit of a shelving/peaking cascade (low shelf, five peaks,
// high shelf) to linear gains at the seven octave centers.
struct CascadeFit {
    BiquadCascade cascade;
    double max_residual_db = 0.0;
};
CascadeFit fit_band_cascade(const BandGains& gains_lin, double sample_rate,
                            double tol_db = 0.01, int max_iter = 80);

// Octave bandpass used for RT60 estimation: two cascaded 0 dB bandpass
// sections with Q = sqrt(2).
BiquadCascade octave_band_filter(double fc, double sample_rate);

// ---------------------------------------------------------------------------
// 7-band linear-phase FIR (frequency sampling), default length 256.

std::vector<double> design_band_fir(const BandGains& gains_lin, double sample_rate,
                                    int length = 256);
double fir_magnitude(const std::vector<double>& h, double freq_hz, double sample_rate);

// ---------------------------------------------------------------------------
// Fractional delay: 64-tap windowed sinc (Blackman), exact at integer delays.

inline constexpr int kFracDelayTaps = 64;
inline constexpr int kFracDelayHalf = 32;  // kernel spans [-32, 32) around the delay

// Kernel in reversed (dot-product) order for a fractional part mu in [0,1):
// out[n] = sum_j k[j] * x[n - floor(d) - 32 + j].
std::array<float, kFracDelayTaps> frac_delay_kernel(double mu);

// dst[n] += gain * x(n - delay_samples) for all n in [0, dstlen), x zero padded.
void add_delayed(const float* x, size_t xlen, float* dst, size_t dstlen, double delay_samples,
                 float gain);

Signal fractional_delay(const Signal& x, double delay_s, double sample_rate);

// ---------------------------------------------------------------------------
// Schroeder decay

// Backward-integrated decay curve in dB (0 dB at the start) from squared
// sample energies.
std::vector<double> schroeder_edc_db(const std::vector<double>& energy);

// RT60 = 3 x T20 from a linear fit over the -5..-25 dB span of the EDC.
// Throws std::runtime_error when the curve does not reach -25 dB (plus guard
// against fitting into the truncation tail).
double rt60_from_edc(const std::vector<double>& edc_db, double sample_rate);

// ---------------------------------------------------------------------------
// Welch cross-spectra (Hann window, default 512/75% overlap)

class WelchAccumulator {
public:
    explicit WelchAccumulator(int nfft = 512, int hop = 128);

    // Stream samples in; keeps a window-sized carry so chunk boundaries do not
    // lose segments. x and y must advance in lockstep.
    void append(const float* x, const float* y, size_t n);

    int bins() const { return nfft_ / 2 + 1; }
    double bin_freq(int k, double sample_rate) const { return k * sample_rate / nfft_; }
    size_t segments() const { return segments_; }

    // Re(Gxy / sqrt(Gxx Gyy)); NaN where a bin has zero power.
    std::vector<double> coherence() const;

private:
    void process_segment(const float* x, const float* y);

    int nfft_, hop_;
    std::vector<double> window_;
    std::vector<double> gxx_, gyy_;
    std::vector<std::complex<double>> gxy_;
    std::vector<float> carry_x_, carry_y_;
    size_t carried_ = 0;
    size_t segments_ = 0;
};

}  // namespace vrsverb::dsp
