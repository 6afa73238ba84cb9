#include "pairsim/canonical.hpp"

#include <cstdio>

#include "pairsim/csv.hpp"

namespace pairsim {

namespace {
std::string num(double v) { return format_number(v, 0); }

void put_channel(std::map<std::string, std::string>& m, const std::string& p, const ChannelSpec& c)
{
    m[p + ".channel_loss_db"] = num(c.channel_loss_db);
    m[p + ".detuning_hz"] = num(c.detuning_hz);
    m[p + ".fbg_suppression_db"] = num(c.fbg_suppression_db);
    m[p + ".leak_coeff_per_w"] = num(c.leak_coeff_per_w);
    m[p + ".rolloff.count"] = format_number(static_cast<std::uint64_t>(c.rolloff.size()));
    for (std::size_t i = 0; i < c.rolloff.size(); ++i) {
        auto& s = c.rolloff[i];
        std::string q = p + ".rolloff." + std::to_string(i);
        m[q + ".name"] = s.name;
        m[q + ".center_offset_hz"] = num(s.center_offset_hz);
        m[q + ".fwhm_hz"] = num(s.fwhm_hz);
        m[q + ".order"] = num(s.order);
        m[q + ".floor_db"] = num(s.floor_db);
    }
}

void put_detector(std::map<std::string, std::string>& m, const std::string& p, const DetectorSpec& d)
{
    m[p + ".dark_prob_per_gate"] = num(d.dark_prob_per_gate);
    m[p + ".effective_gate_s"] = num(d.effective_gate_s);
    m[p + ".nominal_gate_s"] = num(d.nominal_gate_s);
    m[p + ".jitter_fwhm_s"] = num(d.jitter_fwhm_s);
    m[p + ".jitter_model"] = to_string(d.jitter_model);
    m[p + ".afterpulse_prob"] = num(d.afterpulse_prob);
    m[p + ".afterpulse_decay"] = num(d.afterpulse_decay);
}
} // namespace

std::map<std::string, std::string> flatten(const SimConfig& c, bool with_seed)
{
    std::map<std::string, std::string> m;
    auto& w = c.waveguide;
    m["waveguide.length_m"] = num(w.length_m);
    m["waveguide.group_index"] = num(w.group_index);
    m["waveguide.reference_group_index"] = num(w.reference_group_index);
    m["waveguide.gamma0_per_w_m"] = num(w.gamma0);
    m["waveguide.beta2_s2_per_m"] = num(w.beta2);
    m["waveguide.alpha_db_per_m"] = num(w.alpha_db_per_m);
    m["waveguide.facet_loss_db"] = num(w.facet_loss_db);
    m["waveguide.p_sat_w"] = num(w.p_sat_w);
    m["waveguide.kappa_cal"] = num(w.kappa_cal);
    m["waveguide.pair_absorption_order"] = num(w.pair_absorption_order);
    m["pump.rep_rate_hz"] = num(c.pump.rep_rate_hz);
    m["pump.wavelength_m"] = num(c.pump.wavelength_m);
    m["pump.pulse_fwhm_s"] = num(c.pump.pulse_fwhm_s);
    m["pump.peak_power_w"] = num(c.pump.peak_power_w);
    put_channel(m, "signal", c.signal_ch);
    put_channel(m, "idler", c.idler_ch);
    put_detector(m, "spd1", c.spd1);
    put_detector(m, "spd2", c.spd2);
    m["protocol.laser_rate_hz"] = num(c.protocol.laser_rate_hz);
    m["protocol.spd1_rate_hz"] = num(c.protocol.spd1_rate_hz);
    m["protocol.accidental_mode"] = to_string(c.protocol.accidental_mode);
    m["protocol.gates_total"] = format_number(c.protocol.gates_total);
    m["pair_statistics"] = to_string(c.pair_statistics);
    if (with_seed)
        m["seed"] = format_number(c.seed);
    return m;
}

std::uint64_t config_hash(const SimConfig& c)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](const std::string& s) {
        for (unsigned char ch : s) {
            h ^= ch;
            h *= 0x100000001b3ULL;
        }
    };
    for (auto& [k, v] : flatten(c, false)) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    return h;
}

std::string hash_hex(std::uint64_t h)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace pairsim
