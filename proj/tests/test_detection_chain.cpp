#include <doctest.h>

#include <cmath>
#include <limits>

#include "pairsim/config.hpp"
#include "pairsim/detection_chain.hpp"
#include "pairsim/errors.hpp"
#include "pairsim/rng.hpp"

using namespace pairsim;
using doctest::Approx;

namespace {

// standard normal cdf through the complementary error function
double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

DetectorSpec det(double gate, double fwhm, JitterModel m)
{
    DetectorSpec d;
    d.effective_gate_s = gate;
    d.jitter_fwhm_s = fwhm;
    d.jitter_model = m;
    return d;
}

} // namespace

TEST_CASE("channel transmission")
{
    ChannelSpec ch;
    ch.channel_loss_db = 0;
    CHECK(channel_transmission(ch) == 1.0);
    ch.channel_loss_db = 22;
    CHECK(channel_transmission(ch) == Approx(0.00631).epsilon(1e-3));
    ch.channel_loss_db = 3;
    CHECK(channel_transmission(ch) == Approx(0.501).epsilon(1e-3));

    for (double a : {0.0, 0.5, 3.0, 12.0, 22.0})
        for (double b : {0.0, 1.5, 8.5, 10.0})
            CHECK(std::abs(db_to_transmission(a + b) - db_to_transmission(a) * db_to_transmission(b)) <=
                  1e-12 * db_to_transmission(a + b));
}

TEST_CASE("gate overlap, gaussian reading")
{
    // p_j = Phi(W/2s) - Phi(-W/2s), s = FWHM / (2 sqrt(2 ln 2))
    auto oracle = [](double W, double F) {
        double s = F / 2.354820045;
        return phi(W / (2 * s)) - phi(-W / (2 * s));
    };
    auto d = det(0.5e-9, 0.7e-9, JitterModel::gaussian);
    CHECK(gate_overlap_probability(d) == Approx(oracle(0.5e-9, 0.7e-9)).epsilon(1e-8));
    CHECK(gate_overlap_probability(d) == Approx(0.60).epsilon(0.01));
    d.jitter_fwhm_s = 1.1e-9;
    CHECK(gate_overlap_probability(d) == Approx(oracle(0.5e-9, 1.1e-9)).epsilon(1e-8));
    CHECK(gate_overlap_probability(d) == Approx(0.41).epsilon(0.01));
    d.jitter_fwhm_s = 0;
    CHECK(gate_overlap_probability(d) == 1.0);
}

TEST_CASE("gate overlap, uniform reading")
{
    auto d = det(0.5e-9, 0.7e-9, JitterModel::uniform);
    CHECK(gate_overlap_probability(d) == Approx(0.5 / 0.7).epsilon(1e-12));
    CHECK(gate_overlap_probability(d) == Approx(0.714).epsilon(1e-3));
    d.jitter_fwhm_s = 1.1e-9;
    CHECK(gate_overlap_probability(d) == Approx(0.4545).epsilon(1e-3));
    d.jitter_fwhm_s = 0.3e-9;
    CHECK(gate_overlap_probability(d) == 1.0);
}

TEST_CASE("gate overlap monotonicity")
{
    for (auto m : {JitterModel::gaussian, JitterModel::uniform}) {
        double prev = 2;
        for (double f = 0.05e-9; f < 3e-9; f += 0.05e-9) {
            double p = gate_overlap_probability(det(0.5e-9, f, m));
            CHECK(p > 0.0);
            CHECK(p <= 1.0);
            CHECK(p <= prev);
            prev = p;
        }
        prev = -1;
        for (double w = 0.05e-9; w <= 2.5e-9; w += 0.05e-9) {
            double p = gate_overlap_probability(det(w, 1.1e-9, m));
            CHECK(p >= prev);
            prev = p;
        }
    }
}

TEST_CASE("stage roll-off")
{
    RolloffStage st;
    st.fwhm_hz = 0.6e12;
    st.order = 2;
    st.floor_db = 30;
    double eps = 1e-3;
    CHECK(stage_transmission(st, 0) == Approx(1.0).epsilon(1e-14));
    CHECK(stage_transmission(st, 0.3e12) == Approx((1 - eps) * 0.5 + eps).epsilon(1e-12));
    CHECK(stage_transmission(st, -0.3e12) == stage_transmission(st, 0.3e12));
    CHECK(stage_transmission(st, 5e12) == Approx(eps).epsilon(1e-9));
}

TEST_CASE("pump leakage")
{
    ChannelSpec ch = preset("paper-96um").signal_ch;
    CHECK(pump_leakage_rate(0.0, ch) == 0.0);

    double l1 = pump_leakage_rate(0.1, ch), l3 = pump_leakage_rate(0.3, ch);
    CHECK(l3 == Approx(3 * l1).epsilon(1e-12));

    // by hand: kappa P 10^(-S/10), S = fbg + sum of stage rejections
    double s = ch.fbg_suppression_db;
    for (auto& st : ch.rolloff) {
        double eps = std::pow(10.0, -st.floor_db / 10);
        double x = 2 * std::abs(ch.detuning_hz + st.center_offset_hz) / st.fwhm_hz;
        s -= 10 * std::log10((1 - eps) * std::exp(-std::log(2.0) * std::pow(x, 2 * st.order)) + eps);
    }
    CHECK(pump_leakage_rate(0.2, ch) ==
          Approx(ch.leak_coeff_per_w * 0.2 * std::pow(10.0, -s / 10)).epsilon(1e-12));

    double prev = 1e300;
    for (double df = 0; df <= 0.7e12; df += 0.01e12) {
        ch.detuning_hz = df;
        double l = pump_leakage_rate(0.17, ch);
        CHECK(l <= prev);
        prev = l;
    }

    ch.fbg_suppression_db = std::numeric_limits<double>::infinity();
    CHECK(pump_leakage_rate(0.5, ch) == 0.0);

    // calibrated level at the operating point
    auto c = preset("paper-96um");
    CHECK(pump_leakage_rate(0.17, c.signal_ch) == Approx(3e-6).epsilon(1e-9));
}

TEST_CASE("after-pulse hazard")
{
    DetectorSpec d;
    d.afterpulse_prob = 0.008;
    d.afterpulse_decay = 0.5;
    CHECK(afterpulse_hazard(d, 0) == 0.0);
    CHECK(afterpulse_hazard(d, 1) == Approx(0.008));
    CHECK(afterpulse_hazard(d, 4) == Approx(0.001));
    std::uint64_t h = afterpulse_horizon(d);
    CHECK(afterpulse_hazard(d, h) > 0.0);
    CHECK(afterpulse_hazard(d, h + 1) == 0.0);
    d.afterpulse_prob = 0;
    CHECK(afterpulse_horizon(d) == 0);
}

TEST_CASE("detect composition")
{
    DetectorSpec d;
    d.dark_prob_per_gate = 0;
    d.afterpulse_prob = 0.01;
    for (double u : {1e-12, 0.3, 0.999999})
        CHECK_FALSE(detect(0.0, d, false, u));

    d.dark_prob_per_gate = 4e-5;
    CHECK(click_probability(0.0, d, 0.0) == Approx(4e-5).epsilon(1e-12));

    d.jitter_fwhm_s = 0;
    CHECK(click_probability(1e4, d, 0.0) == 1.0);

    // 1e6 gates against 1 - (1 - p_ph)(1 - d)(1 - p_ap)
    d = DetectorSpec{};
    d.dark_prob_per_gate = 0.02;
    d.afterpulse_prob = 0.05;
    double pj = gate_overlap_probability(d);
    for (bool prior : {false, true}) {
        double mean = 0.3;
        double p = 1 - std::exp(-mean * pj) * (1 - 0.02) * (1 - (prior ? 0.05 : 0.0));
        Rng rng(derive_seed(7, prior));
        const int n = 1000000;
        int k = 0;
        for (int i = 0; i < n; ++i)
            k += detect(mean, d, prior, rng);
        double se = std::sqrt(p * (1 - p) / n);
        CHECK(std::abs(k / double(n) - p) < 3 * se);
    }
}

TEST_CASE("detection validation names the field")
{
    ChannelSpec ch;
    ch.channel_loss_db = -1;
    CHECK_THROWS_WITH_AS(validate(ch), doctest::Contains("channel_loss_db"), ConfigError);
    ch = ChannelSpec{};
    ch.detuning_hz = 0.9e12;
    CHECK_THROWS_AS(validate(ch, true), ConfigError);
    CHECK_NOTHROW(validate(ch, false));

    DetectorSpec d;
    d.effective_gate_s = 3e-9;
    CHECK_THROWS_WITH_AS(validate(d), doctest::Contains("effective_gate_s"), ConfigError);

    GatingProtocol p;
    p.spd1_rate_hz = 2e7;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("spd1_rate_hz"), ConfigError);
}
