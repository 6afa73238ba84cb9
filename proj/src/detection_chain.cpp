#include "pairsim/detection_chain.hpp"

#include <cmath>
#include <string>

#include "pairsim/errors.hpp"
#include "pairsim/rng.hpp"

namespace pairsim {

namespace {
void require(bool ok, const std::string& field, const char* what)
{
    if (!ok)
        throw ConfigError(field + ": " + what);
}
} // namespace

const char* to_string(ChannelRole r) { return r == ChannelRole::signal ? "signal" : "idler"; }
const char* to_string(JitterModel m) { return m == JitterModel::gaussian ? "gaussian" : "uniform"; }
const char* to_string(AccidentalMode m)
{
    return m == AccidentalMode::delayed_gate ? "delayed-gate" : "next-trigger";
}

void validate(const ChannelSpec& ch, bool check_reach)
{
    std::string p = to_string(ch.role);
    require(ch.channel_loss_db >= 0, p + ".channel_loss_db", "must be >= 0");
    require(ch.detuning_hz >= 0, p + ".detuning_hz", "must be >= 0");
    if (check_reach)
        require(ch.detuning_hz <= kAwgReachHz * (1 + 1e-12), p + ".detuning_hz",
                "outside filter reach of 0.7 THz");
    require(ch.fbg_suppression_db >= 0, p + ".fbg_suppression_db", "must be >= 0");
    require(ch.leak_coeff_per_w >= 0, p + ".leak_coeff_per_w", "must be >= 0");
    for (auto& st : ch.rolloff) {
        require(st.fwhm_hz > 0, p + ".rolloff.fwhm_hz", "must be > 0");
        require(st.order > 0, p + ".rolloff.order", "must be > 0");
        require(st.floor_db >= 0, p + ".rolloff.floor_db", "must be >= 0");
    }
}

void validate(const DetectorSpec& d)
{
    require(d.dark_prob_per_gate >= 0 && d.dark_prob_per_gate < 1, "detector.dark_prob_per_gate",
            "must lie in [0,1)");
    require(d.effective_gate_s > 0, "detector.effective_gate_s", "must be > 0");
    require(d.effective_gate_s <= d.nominal_gate_s, "detector.effective_gate_s",
            "must not exceed nominal_gate_s");
    require(d.jitter_fwhm_s >= 0, "detector.jitter_fwhm_s", "must be >= 0");
    require(d.afterpulse_prob >= 0 && d.afterpulse_prob <= 1, "detector.afterpulse_prob",
            "must lie in [0,1]");
    require(d.afterpulse_decay >= 0 && d.afterpulse_decay <= 1, "detector.afterpulse_decay",
            "must lie in [0,1]");
}

void validate(const GatingProtocol& p)
{
    require(p.laser_rate_hz > 0, "protocol.laser_rate_hz", "must be > 0");
    require(p.spd1_rate_hz > 0, "protocol.spd1_rate_hz", "must be > 0");
    require(p.spd1_rate_hz <= p.laser_rate_hz, "protocol.spd1_rate_hz",
            "must not exceed laser_rate_hz");
    require(p.gates_total >= 1, "protocol.gates_total", "must be >= 1");
}

double db_to_transmission(double db) { return std::pow(10.0, -db / 10.0); }

double channel_transmission(const ChannelSpec& ch) { return db_to_transmission(ch.channel_loss_db); }

double stage_transmission(const RolloffStage& st, double pump_offset_hz)
{
    double eps = db_to_transmission(st.floor_db);
    double x = 2.0 * std::abs(pump_offset_hz) / st.fwhm_hz;
    return (1.0 - eps) * std::exp(-std::log(2.0) * std::pow(x, 2.0 * st.order)) + eps;
}

double total_suppression_db(const ChannelSpec& ch)
{
    double s = ch.fbg_suppression_db;
    for (auto& st : ch.rolloff)
        s -= 10.0 * std::log10(stage_transmission(st, ch.detuning_hz + st.center_offset_hz));
    return s;
}

double pump_leakage_rate(double p_peak, const ChannelSpec& ch)
{
    if (p_peak <= 0.0 || ch.leak_coeff_per_w == 0.0)
        return 0.0;
    double s = total_suppression_db(ch);
    if (std::isinf(s))
        return 0.0;
    return ch.leak_coeff_per_w * p_peak * db_to_transmission(s);
}

double gate_overlap_probability(const DetectorSpec& d)
{
    if (d.jitter_fwhm_s <= 0.0)
        return 1.0;
    if (d.jitter_model == JitterModel::uniform)
        return std::min(1.0, d.effective_gate_s / d.jitter_fwhm_s);
    double sigma = d.jitter_fwhm_s / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    return std::erf(d.effective_gate_s / (2.0 * sigma) / std::sqrt(2.0));
}

double afterpulse_hazard(const DetectorSpec& d, std::uint64_t tau)
{
    if (tau == 0 || d.afterpulse_prob == 0.0)
        return 0.0;
    double h = d.afterpulse_prob * std::pow(d.afterpulse_decay, static_cast<double>(tau - 1));
    return h < kHazardCutoff ? 0.0 : h;
}

std::uint64_t afterpulse_horizon(const DetectorSpec& d)
{
    if (d.afterpulse_prob < kHazardCutoff)
        return 0;
    if (d.afterpulse_decay >= 1.0)
        return UINT64_MAX;
    if (d.afterpulse_decay <= 0.0)
        return 1;
    double n = std::log(kHazardCutoff / d.afterpulse_prob) / std::log(d.afterpulse_decay);
    std::uint64_t t = static_cast<std::uint64_t>(std::ceil(n)) + 2;
    while (t > 1 && afterpulse_hazard(d, t) == 0.0)
        --t;
    return t;
}

double click_probability(double mean_photons, const DetectorSpec& d, double hazard)
{
    double pj = gate_overlap_probability(d);
    double none = std::exp(-mean_photons * pj) * (1.0 - d.dark_prob_per_gate) * (1.0 - hazard);
    return 1.0 - none;
}

bool detect(double mean_photons, const DetectorSpec& d, bool prior, double u)
{
    return u < click_probability(mean_photons, d, prior ? d.afterpulse_prob : 0.0);
}

bool detect(double mean_photons, const DetectorSpec& d, bool prior, Rng& rng)
{
    return detect(mean_photons, d, prior, rng.uniform());
}

} // namespace pairsim
