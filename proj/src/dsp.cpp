#include "vrsverb/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "vrsverb/vec.hpp"

namespace vrsverb::dsp {

// ---------------------------------------------------------------------------
// FFT

void fft_inplace(std::complex<double>* a, int n, bool inverse) {
    if (n <= 1 || (n & (n - 1)) != 0) throw std::invalid_argument("fft: size must be a power of two");
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / len * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (int k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double s = 1.0 / n;
        for (int i = 0; i < n; ++i) a[i] *= s;
    }
}

// ---------------------------------------------------------------------------
// Biquads

std::complex<double> Biquad::response(double freq_hz, double sample_rate) const {
    const double w = 2.0 * kPi * freq_hz / sample_rate;
    const std::complex<double> z1i = std::polar(1.0, -w);
    const std::complex<double> z2i = z1i * z1i;
    return (b0 + b1 * z1i + b2 * z2i) / (1.0 + a1 * z1i + a2 * z2i);
}

Biquad peaking_eq(double fc, double sample_rate, double q, double gain_db) {
    const double amp = std::pow(10.0, gain_db / 40.0);
    const double w0 = 2.0 * kPi * fc / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha / amp;
    Biquad f;
    f.b0 = (1.0 + alpha * amp) / a0;
    f.b1 = (-2.0 * std::cos(w0)) / a0;
    f.b2 = (1.0 - alpha * amp) / a0;
    f.a1 = f.b1;
    f.a2 = (1.0 - alpha / amp) / a0;
    return f;
}

static Biquad shelf(double fc, double sample_rate, double gain_db, bool high) {
    const double amp = std::pow(10.0, gain_db / 40.0);
    const double w0 = 2.0 * kPi * fc / sample_rate;
    const double cw = std::cos(w0);
    const double alpha = std::sin(w0) / 2.0 * std::sqrt(2.0);  // S = 1
    const double two_sqrt_a_alpha = 2.0 * std::sqrt(amp) * alpha;
    const double sgn = high ? 1.0 : -1.0;
    const double ap1 = amp + 1.0, am1 = amp - 1.0;
    const double a0 = ap1 - sgn * am1 * cw + two_sqrt_a_alpha;
    Biquad f;
    f.b0 = amp * (ap1 + sgn * am1 * cw + two_sqrt_a_alpha) / a0;
    f.b1 = -2.0 * sgn * amp * (am1 + sgn * ap1 * cw) / a0;
    f.b2 = amp * (ap1 + sgn * am1 * cw - two_sqrt_a_alpha) / a0;
    f.a1 = 2.0 * sgn * (am1 - sgn * ap1 * cw) / a0;
    f.a2 = (ap1 - sgn * am1 * cw - two_sqrt_a_alpha) / a0;
    return f;
}

Biquad low_shelf(double fc, double sample_rate, double gain_db) {
    return shelf(fc, sample_rate, gain_db, false);
}

Biquad high_shelf(double fc, double sample_rate, double gain_db) {
    return shelf(fc, sample_rate, gain_db, true);
}

Biquad bandpass(double fc, double sample_rate, double q) {
    const double w0 = 2.0 * kPi * fc / sample_rate;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double a0 = 1.0 + alpha;
    Biquad f;
    f.b0 = alpha / a0;
    f.b1 = 0.0;
    f.b2 = -alpha / a0;
    f.a1 = -2.0 * std::cos(w0) / a0;
    f.a2 = (1.0 - alpha) / a0;
    return f;
}

double BiquadCascade::magnitude_db(double freq_hz, double sample_rate) const {
    double db = 0.0;
    for (const auto& s : sections) db += 20.0 * std::log10(std::abs(s.response(freq_hz, sample_rate)));
    return db;
}

CascadeFit fit_band_cascade(const BandGains& gains_lin, double sample_rate, double tol_db,
                            int max_iter) {
    BandGains target_db{};
    for (int b = 0; b < kNumBands; ++b) {
        if (gains_lin[b] <= 0.0) throw std::invalid_argument("fit_band_cascade: gains must be > 0");
        target_db[b] = 20.0 * std::log10(gains_lin[b]);
    }

    // Section corner/center frequencies: shelf corners at the geometric
    // midpoints next to the outer bands, peaks on the inner centers.
    const double lo_fc = std::sqrt(kBandCenters[0] * kBandCenters[1]);
    const double hi_fc = std::sqrt(kBandCenters[5] * kBandCenters[6]);
    const double peak_q = 1.2;

    BandGains section_db = target_db;
    CascadeFit fit;
    // The octave-band average is what a band-filtered decay measurement sees,
    // so the residual is evaluated across each octave, not just its center.
    const double third = std::pow(2.0, 1.0 / 3.0);
    for (int it = 0; it < max_iter; ++it) {
        fit.cascade.sections.clear();
        fit.cascade.sections.push_back(low_shelf(lo_fc, sample_rate, section_db[0]));
        for (int b = 1; b <= 5; ++b)
            fit.cascade.sections.push_back(
                peaking_eq(kBandCenters[b], sample_rate, peak_q, section_db[b]));
        fit.cascade.sections.push_back(high_shelf(hi_fc, sample_rate, section_db[6]));

        fit.max_residual_db = 0.0;
        BandGains resid{};
        for (int b = 0; b < kNumBands; ++b) {
            const double fc = kBandCenters[b];
            const double band_db = (fit.cascade.magnitude_db(fc / third, sample_rate) +
                                    fit.cascade.magnitude_db(fc, sample_rate) +
                                    fit.cascade.magnitude_db(fc * third, sample_rate)) /
                                   3.0;
            resid[b] = target_db[b] - band_db;
            fit.max_residual_db = std::max(fit.max_residual_db, std::abs(resid[b]));
        }
        if (fit.max_residual_db < tol_db) break;
        for (int b = 0; b < kNumBands; ++b) section_db[b] += 0.8 * resid[b];
    }
    return fit;
}

BiquadCascade octave_band_filter(double fc, double sample_rate) {
    BiquadCascade c;
    c.sections.push_back(bandpass(fc, sample_rate, std::sqrt(2.0)));
    c.sections.push_back(bandpass(fc, sample_rate, std::sqrt(2.0)));
    return c;
}

// ---------------------------------------------------------------------------
// Band FIR

// Piecewise log-frequency interpolation of the band gains, flat beyond the
// outer centers.
static double interp_band_gain(const BandGains& g, double f) {
    if (f <= kBandCenters[0]) return g[0];
    if (f >= kBandCenters[kNumBands - 1]) return g[kNumBands - 1];
    int b = 0;
    while (f > kBandCenters[b + 1]) ++b;
    const double t =
        std::log(f / kBandCenters[b]) / std::log(kBandCenters[b + 1] / kBandCenters[b]);
    return g[b] * (1.0 - t) + g[b + 1] * t;
}

std::vector<double> design_band_fir(const BandGains& gains_lin, double sample_rate, int length) {
    if (length <= 0 || (length & (length - 1)) != 0)
        throw std::invalid_argument("design_band_fir: length must be a power of two");
    std::vector<std::complex<double>> spec(length);
    // Integer group delay keeps flat targets an exact pure delay.
    const double group_delay = 0.5 * length;
    for (int k = 0; k <= length / 2; ++k) {
        const double f = k * sample_rate / length;
        const double mag = interp_band_gain(gains_lin, f);
        const std::complex<double> h = std::polar(mag, -2.0 * kPi * k * group_delay / length);
        spec[k] = h;
        if (k > 0 && k < length / 2) spec[length - k] = std::conj(h);
    }
    fft_inplace(spec.data(), length, true);
    std::vector<double> taps(length);
    for (int n = 0; n < length; ++n) taps[n] = spec[n].real();
    return taps;
}

double fir_magnitude(const std::vector<double>& h, double freq_hz, double sample_rate) {
    const double w = 2.0 * kPi * freq_hz / sample_rate;
    std::complex<double> acc(0.0, 0.0);
    for (size_t n = 0; n < h.size(); ++n) acc += h[n] * std::polar(1.0, -w * static_cast<double>(n));
    return std::abs(acc);
}

// ---------------------------------------------------------------------------
// Fractional delay

static double sinc(double u) {
    if (std::abs(u) < 1e-12) return 1.0;
    const double pu = kPi * u;
    return std::sin(pu) / pu;
}

std::array<float, kFracDelayTaps> frac_delay_kernel(double mu) {
    // Reversed order: tap j multiplies x[base + j], base = n - floor(d) - 32,
    // so tap j sits at offset u = 32 - j - mu from the exact delay.
    std::array<float, kFracDelayTaps> k{};
    for (int j = 0; j < kFracDelayTaps; ++j) {
        const double u = static_cast<double>(kFracDelayHalf - j) - mu;
        const double v = u / kFracDelayHalf;
        if (v <= -1.0 || v >= 1.0) {
            k[j] = 0.0f;
            continue;
        }
        const double win = 0.42 + 0.5 * std::cos(kPi * v) + 0.08 * std::cos(2.0 * kPi * v);
        k[j] = static_cast<float>(win * sinc(u));
    }
    return k;
}

void add_delayed(const float* x, size_t xlen, float* dst, size_t dstlen, double delay_samples,
                 float gain) {
    const double fl = std::floor(delay_samples);
    const int64_t di = static_cast<int64_t>(fl);
    const double mu = delay_samples - fl;
    const auto kern = frac_delay_kernel(mu);

    // dst[n] += gain * sum_j kern[j] * x[n - di - 32 + j]; only n with
    // base + j inside x can contribute.
    const int64_t off = -di - kFracDelayHalf;
    const int64_t n_begin = std::max<int64_t>(0, -off - kFracDelayTaps + 1);
    const int64_t n_end =
        std::min<int64_t>(static_cast<int64_t>(dstlen), static_cast<int64_t>(xlen) - off);
    for (int64_t n = n_begin; n < n_end; ++n) {
        const int64_t base = n + off;
        if (base >= 0 && base + kFracDelayTaps <= static_cast<int64_t>(xlen)) {
            const float* xs = x + base;
            float acc = 0.0f;
            for (int j = 0; j < kFracDelayTaps; ++j) acc += kern[j] * xs[j];
            dst[n] += gain * acc;
        } else if (base + kFracDelayTaps > 0 && base < static_cast<int64_t>(xlen)) {
            float acc = 0.0f;
            for (int j = 0; j < kFracDelayTaps; ++j) {
                const int64_t ix = base + j;
                if (ix >= 0 && ix < static_cast<int64_t>(xlen)) acc += kern[j] * x[ix];
            }
            dst[n] += gain * acc;
        }
    }
}

Signal fractional_delay(const Signal& x, double delay_s, double sample_rate) {
    if (delay_s < 0.0) throw std::invalid_argument("fractional_delay: delay must be >= 0");
    const double d = delay_s * sample_rate;
    Signal out(x.size() + static_cast<size_t>(std::floor(d)) + kFracDelayHalf + 1, 0.0f);
    add_delayed(x.data(), x.size(), out.data(), out.size(), d, 1.0f);
    return out;
}

// ---------------------------------------------------------------------------
// Schroeder decay

std::vector<double> schroeder_edc_db(const std::vector<double>& energy) {
    std::vector<double> edc(energy.size());
    double acc = 0.0;
    for (size_t i = energy.size(); i-- > 0;) {
        acc += energy[i];
        edc[i] = acc;
    }
    const double total = acc > 0.0 ? acc : 1.0;
    for (auto& v : edc) v = 10.0 * std::log10(std::max(v / total, 1e-30));
    return edc;
}

double rt60_from_edc(const std::vector<double>& edc_db, double sample_rate) {
    const auto below = [&](double level) -> int64_t {
        for (size_t i = 0; i < edc_db.size(); ++i)
            if (edc_db[i] <= level) return static_cast<int64_t>(i);
        return -1;
    };
    const int64_t i5 = below(-5.0);
    const int64_t i25 = below(-25.0);
    const int64_t i35 = below(-35.0);
    // Demand 10 dB of headroom below
    // the fit range so truncation does not bend the tail of the fit.
    if (i5 < 0 || i25 < 0 || i35 < 0 || i25 <= i5)
        throw std::runtime_error("rt60_from_edc: insufficient decay range");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto n = static_cast<double>(i25 - i5 + 1);
    for (int64_t i = i5; i <= i25; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        sx += t;
        sy += edc_db[i];
        sxx += t * t;
        sxy += t * edc_db[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(slope < 0.0)) throw std::runtime_error("rt60_from_edc: non-decaying curve");
    return -60.0 / slope;
}

// ---------------------------------------------------------------------------
// Welch

WelchAccumulator::WelchAccumulator(int nfft, int hop) : nfft_(nfft), hop_(hop) {
    if (nfft <= 0 || (nfft & (nfft - 1)) != 0 || hop <= 0 || hop > nfft)
        throw std::invalid_argument("WelchAccumulator: bad window parameters");
    window_.resize(nfft);
    for (int n = 0; n < nfft; ++n) window_[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * n / nfft));
    gxx_.assign(bins(), 0.0);
    gyy_.assign(bins(), 0.0);
    gxy_.assign(bins(), {0.0, 0.0});
    carry_x_.reserve(nfft);
    carry_y_.reserve(nfft);
}

void WelchAccumulator::process_segment(const float* x, const float* y) {
    // One complex FFT carries both windowed channels (x + iy).
    std::vector<std::complex<double>> z(nfft_);
    for (int n = 0; n < nfft_; ++n)
        z[n] = {window_[n] * static_cast<double>(x[n]), window_[n] * static_cast<double>(y[n])};
    fft_inplace(z.data(), nfft_);
    for (int k = 0; k <= nfft_ / 2; ++k) {
        const std::complex<double> zk = z[k];
        const std::complex<double> zn = std::conj(z[(nfft_ - k) & (nfft_ - 1)]);
        const std::complex<double> xk = 0.5 * (zk + zn);
        const std::complex<double> yk = std::complex<double>(0.0, -0.5) * (zk - zn);
        gxx_[k] += std::norm(xk);
        gyy_[k] += std::norm(yk);
        gxy_[k] += xk * std::conj(yk);
    }
    ++segments_;
}

void WelchAccumulator::append(const float* x, const float* y, size_t n) {
    std::vector<float> bx(carry_x_.begin(), carry_x_.end());
    std::vector<float> by(carry_y_.begin(), carry_y_.end());
    bx.insert(bx.end(), x, x + n);
    by.insert(by.end(), y, y + n);

    size_t pos = 0;
    while (pos + static_cast<size_t>(nfft_) <= bx.size()) {
        process_segment(bx.data() + pos, by.data() + pos);
        pos += hop_;
    }
    carry_x_.assign(bx.begin() + pos, bx.end());
    carry_y_.assign(by.begin() + pos, by.end());
    carried_ = carry_x_.size();
}

std::vector<double> WelchAccumulator::coherence() const {
    std::vector<double> c(bins());
    for (int k = 0; k < bins(); ++k) {
        const double denom = gxx_[k] * gyy_[k];
        c[k] = denom > 0.0 ? (gxy_[k] / std::sqrt(denom)).real()
                           : std::numeric_limits<double>::quiet_NaN();
    }
    return c;
}

}  // namespace vrsverb::dsp
