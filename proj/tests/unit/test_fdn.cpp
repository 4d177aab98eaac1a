#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "vrsverb/fdn.hpp"

using namespace vrsverb;
using namespace vrsverb::fdn;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

TEST_CASE("eyring rt60 reproduces the fixture targets") {
    const auto lab = scene::fixture("Laboratory");
    for (double t : eyring_rt60(lab.room)) CHECK(std::abs(t - 0.4) < 0.2 * 0.4);

    const auto aula = scene::fixture("Aula");
    const auto rt = eyring_rt60(aula.room);
    CHECK(std::abs(rt[0] - 7.2) < 0.2 * 7.2);
    CHECK(std::abs(rt[6] - 1.5) < 0.2 * 1.5);

    const auto stair = scene::fixture("Staircase");
    const auto srt = eyring_rt60(stair.room);
    CHECK(std::abs(srt[0] - 5.3) < 0.2 * 5.3);
    CHECK(std::abs(srt[6] - 2.6) < 0.2 * 2.6);
}

TEST_CASE("eyring rt60 goes to zero for a fully absorbent room") {
    scene::Room r;
    r.dims = {4.0, 3.0, 2.5};
    for (auto& s : r.surfaces) s.absorption.fill(1.0);
    for (double t : eyring_rt60(r)) CHECK(t == 0.0);
}

TEST_CASE("delay lengths are in range, distinct and pairwise coprime") {
    const auto d = make_delay_lengths(44100.0);
    REQUIRE(d.size() == 96);
    for (int v : d) {
        CHECK(v >= static_cast<int>(0.018 * 44100.0));
        CHECK(v <= static_cast<int>(0.105 * 44100.0));
    }
    for (size_t i = 0; i < d.size(); ++i)
        for (size_t j = i + 1; j < d.size(); ++j) CHECK(std::gcd(d[i], d[j]) == 1);
}

TEST_CASE("random orthogonal matrix: orthogonality and determinism") {
    const auto q1 = random_orthogonal(96, 42);
    const auto q2 = random_orthogonal(96, 42);
    const auto q3 = random_orthogonal(96, 43);
    CHECK((q1 - q2).cwiseAbs().maxCoeff() == 0.0);
    CHECK((q1 - q3).cwiseAbs().maxCoeff() > 1e-3);
    const double err =
        (q1.transpose() * q1 - Eigen::MatrixXd::Identity(96, 96)).cwiseAbs().maxCoeff();
    CHECK(err < 1e-12);
}

TEST_CASE("lossless loop conserves delay-line energy") {
    const std::vector<int> delays = {64, 67, 71, 73, 79, 83, 89, 97};
    const auto fb = random_orthogonal(8, 7);
    FdnProcessor proc(delays, fb, {});

    RowMatrix in = RowMatrix::Zero(8, 32), out;
    in(0, 0) = 1.0;
    proc.process(in, out);
    const double e0 = proc.state_energy();
    CHECK(e0 == doctest::Approx(1.0).epsilon(1e-12));

    in.setZero();
    for (int block = 0; block < 400; ++block) {
        proc.process(in, out);
        CHECK(std::abs(proc.state_energy() - e0) < 1e-6 * e0);
    }
}

static FdnConfig flat_config(double rt60, double fs, uint64_t seed) {
    FdnConfig cfg;
    cfg.delays = make_delay_lengths(fs);
    cfg.feedback = random_orthogonal(kNumLines, seed);
    cfg.band_rt60.fill(rt60);
    cfg.sample_rate = fs;
    cfg.seed = seed;
    return cfg;
}

static Injection unit_injection() {
    Injection inj;
    inj.line = 0;
    inj.delay_s = 0.0;
    inj.band_gains.fill(1.0);
    return inj;
}

TEST_CASE("impulse-driven FDN decays with the target RT60 in every band") {
    const double fs = 44100.0;
    const FdnConfig cfg = flat_config(0.4, fs, 11);
    const auto ch = run_fdn(cfg, {unit_injection()}, nullptr, 0.9);
    REQUIRE(ch.size() == 96);

    for (int b = 0; b < dsp::kNumBands; ++b) {
        std::vector<double> energy(ch[0].size(), 0.0);
        for (const auto& line : ch) {
            auto f = dsp::octave_band_filter(dsp::kBandCenters[b], fs);
            for (size_t n = 0; n < line.size(); ++n) {
                const double y = f.process(line[n]);
                energy[n] += y * y;
            }
        }
        const double rt = dsp::rt60_from_edc(dsp::schroeder_edc_db(energy), fs);
        CHECK(std::abs(rt - 0.4) < 0.10 * 0.4);
    }
}

TEST_CASE("zero input produces zero output") {
    const FdnConfig cfg = flat_config(0.5, 44100.0, 3);
    Signal zeros(2000, 0.0f);
    const auto ch = run_fdn(cfg, {unit_injection()}, &zeros, 0.3);
    for (const auto& line : ch)
        for (float v : line) CHECK(v == 0.0f);
}

TEST_CASE("identical seed and config give bit-identical output") {
    const FdnConfig cfg = flat_config(0.3, 44100.0, 99);
    const auto a = run_fdn(cfg, {unit_injection()}, nullptr, 0.25);
    const auto b = run_fdn(cfg, {unit_injection()}, nullptr, 0.25);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t n = 0; n < a[i].size(); ++n) REQUIRE(a[i][n] == b[i][n]);
}

TEST_CASE("infinite RT60 is rejected as unstable") {
    FdnConfig cfg = flat_config(0.4, 44100.0, 1);
    cfg.band_rt60[3] = std::numeric_limits<double>::infinity();
    CHECK_THROWS(run_fdn(cfg, {unit_injection()}, nullptr, 0.1));
}

TEST_CASE("run_fdn input validation") {
    const FdnConfig cfg = flat_config(0.4, 44100.0, 1);
    CHECK_THROWS(run_fdn(cfg, {}, nullptr, 0.1));
    CHECK_THROWS(run_fdn(cfg, {unit_injection()}, nullptr, 0.0));
    Injection bad = unit_injection();
    bad.line = 96;
    CHECK_THROWS(run_fdn(cfg, {bad}, nullptr, 0.1));
}

TEST_CASE("downmix: 96 is the identity, 48 sums exactly two channels") {
    GaussianNoise rng(5);
    std::vector<Signal> fine(96, Signal(512));
    for (auto& s : fine)
        for (auto& v : s) v = static_cast<float>(rng.next());

    const auto l96 = scene::build_vrs_layout(96);
    const auto id = downmix(fine, l96, 44100.0);
    for (int i = 0; i < 96; ++i)
        for (size_t n = 0; n < fine[i].size(); ++n) REQUIRE(id.signals[i][n] == fine[i][n]);

    const auto l48 = scene::build_vrs_layout(48);
    const auto half = downmix(fine, l48, 44100.0);
    REQUIRE(half.n_vrs == 48);
    // each coarse channel is the sum of its two assigned fine channels
    std::vector<std::vector<int>> members(48);
    for (int f = 0; f < 96; ++f) members[l48.assignment[f]].push_back(f);
    for (int c = 0; c < 48; ++c) {
        REQUIRE(members[c].size() == 2);
        for (size_t n = 0; n < fine[0].size(); ++n)
            CHECK(half.signals[c][n] ==
                  doctest::Approx(fine[members[c][0]][n] + fine[members[c][1]][n]).epsilon(1e-6));
    }
}

TEST_CASE("downmix to 6 VRS: variance adds for incoherent unit inputs") {
    const size_t len = 200000;
    std::vector<Signal> fine(96);
    for (int i = 0; i < 96; ++i) {
        GaussianNoise rng(mix_seed(1234, i));
        fine[i].resize(len);
        for (auto& v : fine[i]) v = static_cast<float>(rng.next());
    }
    const auto mix = downmix(fine, scene::build_vrs_layout(6), 44100.0);
    double total_in = 0.0, total_out = 0.0;
    for (const auto& s : fine) total_in += signal_energy(s);
    for (const auto& s : mix.signals) {
        const double var = signal_energy(s) / static_cast<double>(len);
        CHECK(std::abs(var - 16.0) < 0.10 * 16.0);
        total_out += signal_energy(s);
    }
    CHECK(total_out == doctest::Approx(total_in).epsilon(0.05));
}

TEST_CASE("route_arrivals picks the nearest fine direction") {
    const auto layout = scene::build_vrs_layout(96);
    ism::Reflection r;
    r.direction = layout.directions[17];
    r.delay = 0.01;
    r.band_gains.fill(0.5);
    const auto inj = route_arrivals({r}, layout.directions);
    REQUIRE(inj.size() == 1);
    CHECK(inj[0].line == 17);
    CHECK(inj[0].delay_s == doctest::Approx(0.01));
}

TEST_CASE("anisotropic gains: homogeneous room gives unit weights") {
    const auto f = scene::fixture("Laboratory");
    const auto w = anisotropic_gains(f.room, f.placement, scene::build_vrs_layout(6));
    for (double v : w) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("anisotropic gains: corridor absorber silences the facing VRS") {
    const auto f = scene::fixture("Corridor/A");
    const auto layout = scene::build_vrs_layout(6);
    const auto w = anisotropic_gains(f.room, f.placement, layout);

    int facing = -1;
    std::vector<double> others;
    for (int v = 0; v < 6; ++v) {
        if (layout.directions[v].x < -0.9)
            facing = v;
        else
            others.push_back(w[v]);
    }
    REQUIRE(facing >= 0);
    std::sort(others.begin(), others.end());
    const double median = others[others.size() / 2];
    CHECK(w[facing] < 0.2 * median);
    for (double v : others) CHECK(w[facing] < v);
}

TEST_CASE("anisotropic gains: hemisphere oracle gives 0 and sqrt(2)") {
    const int rays = 200000;
    const std::vector<Vec3> dirs = {{0, 1, 0}, {0, -1, 0}};
    const auto w = anisotropic_gains_sampled(
        [](const Vec3& d) { return d.y > 0.0 ? 1.0 : 0.0; }, dirs, rays);
    // boundary rays leak at most a couple of samples into the wrong half
    CHECK(w[0] < 3.0 * std::sqrt(2.0 / rays));
    CHECK(w[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("fdn incoherence smoke test: channel correlations stay small") {
    const double fs = 44100.0;
    const FdnConfig cfg = flat_config(5.0, fs, 2024);
    GaussianNoise rng(77);
    Signal noise(static_cast<size_t>(5.0 * fs));
    for (auto& v : noise) v = static_cast<float>(rng.next());
    const auto ch = run_fdn(cfg, {unit_injection()}, &noise, 5.0);

    // correlation matrix via a Gram product over the steady part
    const size_t skip = static_cast<size_t>(0.5 * fs);
    const size_t n = ch[0].size() - skip;
    Eigen::MatrixXf y(96, n);
    for (int i = 0; i < 96; ++i)
        for (size_t t = 0; t < n; ++t) y(i, t) = ch[i][skip + t];
    Eigen::MatrixXf gram = y * y.transpose();
    double worst = 0.0;
    for (int i = 0; i < 96; ++i)
        for (int j = i + 1; j < 96; ++j)
            worst = std::max(worst,
                             std::abs(gram(i, j)) / std::sqrt(double(gram(i, i)) * gram(j, j)));
    CHECK(worst < 0.08);
}

TEST_CASE("calibration produces a positive scale and a sane transition time") {
    const auto f = scene::fixture("Laboratory");
    const auto refl = ism::compute_reflections(f.room, f.placement, 3);
    const auto cfg = make_config(f.room, 44100.0, 5);
    const auto layout = scene::build_vrs_layout(96);
    const auto inj = route_arrivals(ism::last_order_arrivals(refl), layout.directions);
    const auto cal = calibrate_injection_scale(refl, cfg, inj);
    CHECK(cal.scale > 0.0);
    CHECK(cal.transition_s > refl.back().delay);
    CHECK(cal.transition_s < refl.back().delay + 0.05);
}
