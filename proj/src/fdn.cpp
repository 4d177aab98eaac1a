#include "vrsverb/fdn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace vrsverb::fdn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Configuration

void FdnConfig::validate() const {
    if (static_cast<int>(delays.size()) != n_lines)
        throw std::invalid_argument("FdnConfig: delay count mismatch");
    for (int d : delays)
        if (d <= 0) throw std::invalid_argument("FdnConfig: delays must be positive");
    std::vector<int> sorted = delays;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("FdnConfig: delays must be pairwise distinct");
    if (feedback.rows() != n_lines || feedback.cols() != n_lines)
        throw std::invalid_argument("FdnConfig: feedback matrix size mismatch");
    const double err = (feedback.transpose() * feedback - Eigen::MatrixXd::Identity(n_lines, n_lines))
                           .cwiseAbs()
                           .maxCoeff();
    if (err > 1e-9) throw std::invalid_argument("FdnConfig: feedback matrix not orthogonal");
    for (double t : band_rt60)
        if (!(t > 0.0)) throw std::invalid_argument("FdnConfig: band RT60 must be positive");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("FdnConfig: bad sample rate");
}

std::vector<int> make_delay_lengths(double sample_rate, int count, double min_s, double max_s) {
    std::vector<int> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        const double seconds = min_s * std::pow(max_s / min_s, t);
        const int target = std::max(2, static_cast<int>(std::lround(seconds * sample_rate)));
        // Nudge outward from the target until pairwise coprime with all
        // accepted lengths.
        for (int step = 0;; ++step) {
            const int cand = target + (step % 2 == 0 ? step / 2 : -(step / 2 + 1));
            if (cand < 2) continue;
            bool ok = true;
            for (int prev : out)
                if (std::gcd(prev, cand) != 1) {
                    ok = false;
                    break;
                }
            if (ok) {
                out.push_back(cand);
                break;
            }
        }
    }
    return out;
}

Eigen::MatrixXd random_orthogonal(int n, uint64_t seed) {
    GaussianNoise rng(mix_seed(seed, 0x0f0fULL));
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = rng.next();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < n; ++c)
        if (r(c, c) < 0.0) q.col(c) = -q.col(c);
    return q;
}

FdnConfig make_config(const scene::Room& room, double sample_rate, uint64_t seed) {
    FdnConfig cfg;
    cfg.delays = make_delay_lengths(sample_rate);
    cfg.feedback = random_orthogonal(kNumLines, seed);
    cfg.band_rt60 = eyring_rt60(room);
    cfg.sample_rate = sample_rate;
    cfg.seed = seed;
    cfg.validate();
    return cfg;
}

scene::Bands eyring_rt60(const scene::Room& room) {
    room.validate();
    const double volume = room.volume();
    const double surface = room.total_surface();
    scene::Bands rt{};
    for (int b = 0; b < dsp::kNumBands; ++b) {
        double mean = 0.0;
        for (int w = 0; w < 6; ++w) mean += room.wall_area(w) * room.surfaces[w].absorption[b];
        mean /= surface;
        rt[b] = mean >= 1.0 - 1e-12 ? 0.0 : 0.161 * volume / (-surface * std::log(1.0 - mean));
    }
    return rt;
}

// ---------------------------------------------------------------------------
// Processor

FdnProcessor::FdnProcessor(const std::vector<int>& delays, const Eigen::MatrixXd& feedback,
                           std::vector<dsp::BiquadCascade> line_filters)
    : delays_(delays), feedback_(feedback), filters_(std::move(line_filters)) {
    const int n = lines();
    if (feedback_.rows() != n || feedback_.cols() != n)
        throw std::invalid_argument("FdnProcessor: feedback size mismatch");
    if (!filters_.empty() && static_cast<int>(filters_.size()) != n)
        throw std::invalid_argument("FdnProcessor: filter count mismatch");
    rings_.resize(n);
    heads_.assign(n, 0);
    int min_delay = delays_[0];
    for (int i = 0; i < n; ++i) {
        if (delays_[i] <= 0) throw std::invalid_argument("FdnProcessor: bad delay");
        rings_[i].assign(delays_[i], 0.0);
        min_delay = std::min(min_delay, delays_[i]);
    }
    max_block_ = std::min(min_delay, 512);
}

void FdnProcessor::process(const RowMatrix& in, RowMatrix& out) {
    const int n = lines();
    const int block = static_cast<int>(in.cols());
    if (block > max_block_) throw std::invalid_argument("FdnProcessor: block too large");
    out.resize(n, block);

    // Oldest samples leave the lines, then pass the attenuation filters.
    for (int i = 0; i < n; ++i) {
        const int len = delays_[i];
        int pos = heads_[i];
        double* row = out.row(i).data();
        const std::vector<double>& ring = rings_[i];
        for (int s = 0; s < block; ++s) {
            row[s] = ring[pos];
            if (++pos == len) pos = 0;
        }
        if (!filters_.empty()) {
            dsp::BiquadCascade& f = filters_[i];
            for (int s = 0; s < block; ++s) row[s] = f.process(row[s]);
        }
    }

    // Orthogonal recirculation plus external input, written back in place of
    // the samples just consumed.
    const RowMatrix fb = feedback_ * out + in;
    for (int i = 0; i < n; ++i) {
        const int len = delays_[i];
        int pos = heads_[i];
        std::vector<double>& ring = rings_[i];
        const double* row = fb.row(i).data();
        for (int s = 0; s < block; ++s) {
            ring[pos] = row[s];
            if (++pos == len) pos = 0;
        }
        heads_[i] = pos;
    }
}

double FdnProcessor::state_energy() const {
    double e = 0.0;
    for (const auto& ring : rings_)
        for (double v : ring) e += v * v;
    return e;
}

// ---------------------------------------------------------------------------
// Per-line attenuation

LineFilterSet design_line_filters(const FdnConfig& config) {
    LineFilterSet set;
    set.filters.reserve(config.n_lines);
    for (int i = 0; i < config.n_lines; ++i) {
        scene::Bands gains{};
        for (int b = 0; b < dsp::kNumBands; ++b) {
            const double g =
                std::pow(10.0, -3.0 * config.delays[i] / (config.sample_rate * config.band_rt60[b]));
            if (g >= 1.0)
                throw std::invalid_argument("design_line_filters: unstable broadband gain");
            gains[b] = g;
        }
        dsp::CascadeFit fit = dsp::fit_band_cascade(gains, config.sample_rate);
        set.max_residual_db = std::max(set.max_residual_db, fit.max_residual_db);
        set.filters.push_back(std::move(fit.cascade));
    }
    return set;
}

// ---------------------------------------------------------------------------
// Running

namespace {

// Per-line input stream: dense coefficient bursts at sample offsets.
struct LineEvent {
    int line;
    int64_t start;
    std::vector<double> samples;
};

std::vector<LineEvent> build_line_events(const std::vector<Injection>& inputs,
                                         const Signal* source, double sample_rate) {
    std::vector<LineEvent> events;
    events.reserve(inputs.size());
    for (const auto& inj : inputs) {
        const auto fir = dsp::design_band_fir(inj.band_gains, sample_rate);
        const int64_t group_delay = static_cast<int64_t>(fir.size() / 2);
        LineEvent ev;
        ev.line = inj.line;
        ev.start = static_cast<int64_t>(std::llround(inj.delay_s * sample_rate)) - group_delay;
        if (source == nullptr) {
            ev.samples = fir;
        } else {
            ev.samples.assign(source->size() + fir.size() - 1, 0.0);
            for (size_t n = 0; n < source->size(); ++n) {
                const double s = (*source)[n];
                if (s == 0.0) continue;
                for (size_t k = 0; k < fir.size(); ++k) ev.samples[n + k] += s * fir[k];
            }
        }
        if (ev.start < 0) {
            // Crop pre-roll (possible only for arrivals earlier than the FIR
            // group delay).
            const size_t cut = static_cast<size_t>(-ev.start);
            if (cut >= ev.samples.size()) continue;
            ev.samples.erase(ev.samples.begin(), ev.samples.begin() + cut);
            ev.start = 0;
        }
        events.push_back(std::move(ev));
    }
    return events;
}

}  // namespace

std::vector<Signal> run_fdn(const FdnConfig& config, const std::vector<Injection>& inputs,
                            const Signal* source, double duration_s) {
    config.validate();
    if (!(duration_s > 0.0)) throw std::invalid_argument("run_fdn: duration must be positive");
    if (inputs.empty()) throw std::invalid_argument("run_fdn: need at least one input arrival");
    for (const auto& inj : inputs)
        if (inj.line < 0 || inj.line >= config.n_lines)
            throw std::invalid_argument("run_fdn: injection line out of range");

    LineFilterSet filters = design_line_filters(config);
    FdnProcessor proc(config.delays, config.feedback, std::move(filters.filters));
    const auto events = build_line_events(inputs, source, config.sample_rate);

    const auto total = static_cast<int64_t>(std::llround(duration_s * config.sample_rate));
    std::vector<Signal> out(config.n_lines, Signal(total, 0.0f));

    RowMatrix in(config.n_lines, proc.max_block());
    RowMatrix block_out;
    for (int64_t t0 = 0; t0 < total; t0 += proc.max_block()) {
        const int block = static_cast<int>(std::min<int64_t>(proc.max_block(), total - t0));
        in.setZero(config.n_lines, block);
        for (const auto& ev : events) {
            const int64_t lo = std::max<int64_t>(ev.start, t0);
            const int64_t hi = std::min<int64_t>(ev.start + static_cast<int64_t>(ev.samples.size()),
                                                 t0 + block);
            for (int64_t t = lo; t < hi; ++t) in(ev.line, t - t0) += ev.samples[t - ev.start];
        }
        proc.process(in.leftCols(block), block_out);
        for (int i = 0; i < config.n_lines; ++i)
            for (int s = 0; s < block; ++s)
                out[i][t0 + s] = static_cast<float>(block_out(i, s));
    }
    return out;
}

VrsSignals downmix(const std::vector<Signal>& fine, const scene::VrsLayout& layout,
                   double sample_rate) {
    layout.validate();
    if (fine.size() != layout.assignment.size())
        throw std::invalid_argument("downmix: expected one signal per fine channel");
    const size_t len = fine.empty() ? 0 : fine[0].size();
    for (const auto& s : fine)
        if (s.size() != len) throw std::invalid_argument("downmix: channel length mismatch");

    VrsSignals out;
    out.n_vrs = layout.n_vrs;
    out.sample_rate = sample_rate;
    out.signals.assign(layout.n_vrs, Signal(len, 0.0f));
    for (size_t f = 0; f < fine.size(); ++f) {
        Signal& dst = out.signals[layout.assignment[f]];
        const Signal& src = fine[f];
        for (size_t n = 0; n < len; ++n) dst[n] += src[n];
    }
    return out;
}

std::vector<Injection> route_arrivals(const std::vector<ism::Reflection>& arrivals,
                                      const std::vector<Vec3>& fine_directions) {
    if (arrivals.empty()) throw std::invalid_argument("route_arrivals: empty arrival set");
    std::vector<Injection> out;
    out.reserve(arrivals.size());
    for (const auto& a : arrivals) {
        int best = 0;
        double best_dot = -2.0;
        for (size_t i = 0; i < fine_directions.size(); ++i) {
            const double d = a.direction.dot(fine_directions[i]);
            if (d > best_dot + 1e-12) {
                best_dot = d;
                best = static_cast<int>(i);
            }
        }
        out.push_back({best, a.delay, a.band_gains});
    }
    return out;
}

// ---------------------------------------------------------------------------
// ISM/FDN level calibration

Calibration calibrate_injection_scale(const std::vector<ism::Reflection>& reflections,
                                      const FdnConfig& config,
                                      const std::vector<Injection>& injections) {
    if (reflections.empty()) throw std::invalid_argument("calibrate: no reflections");

    // Broadband point energies of the ISM arrivals and their decay fit.
    double total = 0.0;
    double t_last = 0.0;
    for (const auto& r : reflections) {
        double e = 0.0;
        for (double g : r.band_gains) e += g * g;
        total += e / dsp::kNumBands;
        t_last = std::max(t_last, r.delay);
    }

    // EDC sampled just before each order >= 2 arrival, fitted linearly in dB.
    std::vector<std::pair<double, double>> pts;  // (t, edc_db)
    {
        std::vector<std::pair<double, double>> arr;  // (delay, energy)
        for (const auto& r : reflections) {
            double e = 0.0;
            for (double g : r.band_gains) e += g * g;
            arr.emplace_back(r.delay, e / dsp::kNumBands);
        }
        std::sort(arr.begin(), arr.end());
        double remaining = total;
        int min_order_time_rank = 0;
        // Skip the direct sound and first-order region: fit from the median
        // arrival onward where the reflection density resembles a decay.
        min_order_time_rank = static_cast<int>(arr.size()) / 3;
        for (size_t i = 0; i < arr.size(); ++i) {
            if (static_cast<int>(i) >= min_order_time_rank && remaining > 1e-30 * total)
                pts.emplace_back(arr[i].first, 10.0 * std::log10(remaining / total));
            remaining -= arr[i].second;
        }
    }
    if (pts.size() < 4) throw std::runtime_error("calibrate: too few arrivals for a decay fit");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [t, db] : pts) {
        sx += t;
        sy += db;
        sxx += t * t;
        sxy += t * db;
    }
    const double n = static_cast<double>(pts.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;

    Calibration cal;
    cal.transition_s = t_last + 0.005;
    cal.target_edc_db = intercept + slope * cal.transition_s;

    // Probe run: unit-scale injections, long enough to cover the transition.
    const double probe_s = cal.transition_s + 0.15;
    const auto probe = run_fdn(config, injections, nullptr, probe_s);
    const auto t_idx = static_cast<size_t>(cal.transition_s * config.sample_rate);
    double fdn_edc = 0.0;
    for (const auto& ch : probe)
        for (size_t i = t_idx; i < ch.size(); ++i) fdn_edc += static_cast<double>(ch[i]) * ch[i];
    if (fdn_edc <= 0.0) throw std::runtime_error("calibrate: silent FDN probe");

    const double target_lin = total * std::pow(10.0, cal.target_edc_db / 10.0);
    cal.scale = std::sqrt(target_lin / fdn_edc);
    return cal;
}

// ---------------------------------------------------------------------------
// Anisotropic weights

std::vector<double> anisotropic_gains_sampled(
    const std::function<double(const Vec3&)>& alpha_of_direction,
    const std::vector<Vec3>& directions, int rays) {
    const int n = static_cast<int>(directions.size());
    std::vector<double> sum(n, 0.0);
    std::vector<int64_t> count(n, 0);
    double global_sum = 0.0;

    const auto ray_dirs = scene::fibonacci_directions(rays);
    for (const Vec3& d : ray_dirs) {
        int best = 0;
        double best_dot = -2.0;
        for (int v = 0; v < n; ++v) {
            const double dot = d.dot(directions[v]);
            if (dot > best_dot + 1e-12) {
                best_dot = dot;
                best = v;
            }
        }
        const double one_minus_alpha = 1.0 - alpha_of_direction(d);
        sum[best] += one_minus_alpha;
        ++count[best];
        global_sum += one_minus_alpha;
    }

    std::vector<double> w(n, 0.0);
    double norm = 0.0;
    for (int v = 0; v < n; ++v) {
        const double mean = count[v] > 0 ? sum[v] / count[v] : global_sum / rays;
        w[v] = std::sqrt(std::max(0.0, mean));
        norm += w[v] * w[v];
    }
    if (norm > 0.0) {
        const double s = std::sqrt(static_cast<double>(n) / norm);
        for (double& v : w) v *= s;
    }
    return w;
}

std::vector<double> anisotropic_gains(const scene::Room& room, const scene::Placement& placement,
                                      const scene::VrsLayout& layout) {
    room.validate();
    placement.validate(room);

    std::array<double, 6> alpha_bb{};
    for (int w = 0; w < 6; ++w) {
        double m = 0.0;
        for (double a : room.surfaces[w].absorption) m += a;
        alpha_bb[w] = m / dsp::kNumBands;
    }

    const Vec3 p = placement.receiver_pos;
    const Vec3 L = room.dims;
    const auto alpha_fn = [&](const Vec3& d) {
        // First wall hit of the ray p + t d.
        double best_t = std::numeric_limits<double>::infinity();
        int wall = 0;
        const double px[3] = {p.x, p.y, p.z};
        const double dx[3] = {d.x, d.y, d.z};
        const double lim[3] = {L.x, L.y, L.z};
        for (int ax = 0; ax < 3; ++ax) {
            if (dx[ax] > 1e-12) {
                const double t = (lim[ax] - px[ax]) / dx[ax];
                if (t < best_t) {
                    best_t = t;
                    wall = 2 * ax + 1;
                }
            } else if (dx[ax] < -1e-12) {
                const double t = -px[ax] / dx[ax];
                if (t < best_t) {
                    best_t = t;
                    wall = 2 * ax;
                }
            }
        }
        return alpha_bb[wall];
    };

    const int rays = std::max(96000, 1000 * layout.n_vrs);
    return anisotropic_gains_sampled(alpha_fn, layout.directions, rays);
}

}  // namespace vrsverb::fdn
