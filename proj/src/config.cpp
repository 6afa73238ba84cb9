#include "pairsim/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pairsim/csv.hpp"
#include "pairsim/errors.hpp"

namespace pairsim {

const Calibration& calibration()
{
    static const Calibration c;
    return c;
}

double insertion_alpha_db_per_m()
{
    // 8, 9, 11 dB insertion loss, 3.5 dB per facet
    return infer_alpha({{96e-6, 8.0}, {196e-6, 9.0}, {396e-6, 11.0}}, 3.5);
}

std::vector<std::string> preset_names() { return {"paper-96um", "paper-196um", "paper-396um"}; }

namespace {

WaveguideSpec base_waveguide(double length_m)
{
    const auto& cal = calibration();
    WaveguideSpec w;
    w.length_m = length_m;
    w.group_index = 30.0;
    w.reference_group_index = 3.0;
    w.gamma0 = 5.0;
    w.beta2 = 1e-21;
    w.alpha_db_per_m = insertion_alpha_db_per_m();
    w.facet_loss_db = 3.5;
    w.pair_absorption_order = 1.0;
    WaveguideSpec w96 = w;
    w96.length_m = 96e-6;
    w.p_sat_w = cal.p_sat_96_w *
                std::pow(effective_length(w96) / effective_length(w), cal.p_sat_length_exponent);
    w.kappa_cal = 1.0;
    return w;
}

double calibrated_kappa()
{
    const auto& cal = calibration();
    WaveguideSpec w = base_waveguide(cal.ref_length_m);
    PumpSpec p;
    p.peak_power_w = cal.ref_power_w;
    return cal.mu_target / pair_rate(p, w, cal.ref_detuning_hz).mu_pairs_per_pulse;
}

ChannelSpec base_channel(ChannelRole role, double detuning_hz)
{
    ChannelSpec c;
    c.role = role;
    c.channel_loss_db = 22.0;
    c.detuning_hz = detuning_hz;
    c.fbg_suppression_db = 12.0;
    c.rolloff = {RolloffStage{"pump-wing", 0.0, 0.594e12, 2.0, 22.0}};
    ChannelSpec ref = c;
    ref.detuning_hz = 0.7e12;
    ref.leak_coeff_per_w = 1.0;
    const auto& cal = calibration();
    c.leak_coeff_per_w = cal.leak_target / pump_leakage_rate(cal.leak_ref_power_w, ref);
    return c;
}

DetectorSpec detector(double dark, double jitter)
{
    DetectorSpec d;
    d.dark_prob_per_gate = dark;
    d.effective_gate_s = 0.5e-9;
    d.nominal_gate_s = 2.5e-9;
    d.jitter_fwhm_s = jitter;
    d.jitter_model = JitterModel::uniform;
    d.afterpulse_prob = 0.008;
    d.afterpulse_decay = 0.5;
    return d;
}

SimConfig build_preset(double length_um, double power_w, double detuning_hz)
{
    SimConfig c;
    c.waveguide = base_waveguide(length_um * 1e-6);
    c.waveguide.kappa_cal = calibrated_kappa();
    c.pump = PumpSpec{1e7, 1554.9e-9, 10e-12, power_w};
    c.signal_ch = base_channel(ChannelRole::signal, detuning_hz);
    c.idler_ch = base_channel(ChannelRole::idler, detuning_hz);
    c.spd1 = detector(2e-5, 0.7e-9);
    c.spd2 = detector(4e-5, 1.1e-9);
    c.protocol = GatingProtocol{1e7, 5e6, AccidentalMode::delayed_gate, 9000000000ULL};
    c.seed = 20140101;
    c.pair_statistics = PairStatistics::poisson;
    return c;
}

} // namespace

SimConfig preset(const std::string& name)
{
    if (name == "paper-96um")
        return build_preset(96, 0.17, 0.7e12);
    if (name == "paper-196um")
        return build_preset(196, 0.13, 0.7e12);
    if (name == "paper-396um")
        return build_preset(396, 0.13, 0.5e12);
    throw ConfigError("preset: unknown name '" + name + "' (paper-96um, paper-196um, paper-396um)");
}

SimConfig preset_for_length(double length_um)
{
    if (length_um < 146)
        return preset("paper-96um");
    if (length_um < 296)
        return preset("paper-196um");
    return preset("paper-396um");
}

SimConfig for_length(const SimConfig& base, double length_um)
{
    SimConfig p = preset_for_length(length_um);
    SimConfig c = base;
    c.waveguide = p.waveguide;
    c.pump.peak_power_w = p.pump.peak_power_w;
    c.signal_ch.detuning_hz = p.signal_ch.detuning_hz;
    c.idler_ch.detuning_hz = p.idler_ch.detuning_hz;
    return c;
}

// --- parsing ----------------------------------------------------------------

namespace {

std::string where(const YAML::Node& n, const std::string& origin)
{
    auto m = n.Mark();
    if (m.line < 0)
        return origin;
    return origin + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

struct Reader {
    std::string origin;

    [[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& what) const
    {
        throw ConfigError(where(n, origin) + ": " + field + ": " + what);
    }

    double number(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar())
            fail(n, field, "expected a number");
        std::string s = n.Scalar();
        double v = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), v);
        if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
            if (s == ".inf" || s == "inf")
                return INFINITY;
            fail(n, field, "expected a number, got '" + s + "'");
        }
        return v;
    }

    std::uint64_t integer(const YAML::Node& n, const std::string& field) const
    {
        double v = number(n, field);
        if (!(v >= 0) || v > 1.8e19 || std::floor(v) != v)
            fail(n, field, "expected a non-negative integer");
        std::string s = n.Scalar();
        std::uint64_t u = 0;
        auto r = std::from_chars(s.data(), s.data() + s.size(), u);
        if (r.ec == std::errc() && r.ptr == s.data() + s.size())
            return u;
        return static_cast<std::uint64_t>(v);
    }

    std::string text(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar())
            fail(n, field, "expected a scalar");
        return n.Scalar();
    }

    using Handler = std::function<void(const YAML::Node&, const std::string&)>;

    void map(const YAML::Node& n, const std::string& prefix, const std::map<std::string, Handler>& h) const
    {
        if (n.IsNull())
            return;
        if (!n.IsMap())
            fail(n, prefix, "expected a mapping");
        for (auto it = n.begin(); it != n.end(); ++it) {
            std::string key = it->first.as<std::string>();
            std::string field = prefix.empty() ? key : prefix + "." + key;
            auto f = h.find(key);
            if (f == h.end())
                fail(it->first, field, "unknown key");
            f->second(it->second, field);
        }
    }
};

ChannelSpec read_channel(const Reader& r, const YAML::Node& n, const std::string& p, ChannelSpec c)
{
    r.map(n, p,
          {{"channel_loss_db", [&](auto& v, auto& f) { c.channel_loss_db = r.number(v, f); }},
           {"detuning_hz", [&](auto& v, auto& f) { c.detuning_hz = r.number(v, f); }},
           {"fbg_suppression_db", [&](auto& v, auto& f) { c.fbg_suppression_db = r.number(v, f); }},
           {"leak_coeff_per_w", [&](auto& v, auto& f) { c.leak_coeff_per_w = r.number(v, f); }},
           {"rolloff", [&](auto& v, auto& f) {
                if (!v.IsSequence())
                    r.fail(v, f, "expected a list of stages");
                c.rolloff.clear();
                for (std::size_t i = 0; i < v.size(); ++i) {
                    RolloffStage s;
                    std::string q = f + "." + std::to_string(i);
                    r.map(v[i], q,
                          {{"name", [&](auto& x, auto& g) { s.name = r.text(x, g); }},
                           {"center_offset_hz", [&](auto& x, auto& g) { s.center_offset_hz = r.number(x, g); }},
                           {"fwhm_hz", [&](auto& x, auto& g) { s.fwhm_hz = r.number(x, g); }},
                           {"order", [&](auto& x, auto& g) { s.order = r.number(x, g); }},
                           {"floor_db", [&](auto& x, auto& g) { s.floor_db = r.number(x, g); }}});
                    c.rolloff.push_back(s);
                }
            }}});
    return c;
}

DetectorSpec read_detector(const Reader& r, const YAML::Node& n, const std::string& p, DetectorSpec d)
{
    r.map(n, p,
          {{"dark_prob_per_gate", [&](auto& v, auto& f) { d.dark_prob_per_gate = r.number(v, f); }},
           {"effective_gate_s", [&](auto& v, auto& f) { d.effective_gate_s = r.number(v, f); }},
           {"nominal_gate_s", [&](auto& v, auto& f) { d.nominal_gate_s = r.number(v, f); }},
           {"jitter_fwhm_s", [&](auto& v, auto& f) { d.jitter_fwhm_s = r.number(v, f); }},
           {"jitter_model", [&](auto& v, auto& f) {
                auto s = r.text(v, f);
                if (s == "gaussian")
                    d.jitter_model = JitterModel::gaussian;
                else if (s == "uniform")
                    d.jitter_model = JitterModel::uniform;
                else
                    r.fail(v, f, "expected gaussian or uniform");
            }},
           {"afterpulse_prob", [&](auto& v, auto& f) { d.afterpulse_prob = r.number(v, f); }},
           {"afterpulse_decay", [&](auto& v, auto& f) { d.afterpulse_decay = r.number(v, f); }}});
    return d;
}

// validation errors name the field; prefix them with the location of the document
void checked_validate(const SimConfig& c, const std::string& origin)
{
    try {
        validate(c, true);
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

} // namespace

SimConfig parse_config_text(const std::string& text, const std::string& origin)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ":" +
                          std::to_string(e.mark.column + 1) + ": parse error: " + e.msg);
    }
    Reader r{origin};
    std::string pname = "paper-196um";
    if (root.IsMap() && root["preset"])
        pname = r.text(root["preset"], "preset");
    SimConfig c;
    try {
        c = preset(pname);
    } catch (const ConfigError& e) {
        r.fail(root["preset"], "preset", e.what());
    }
    if (root.IsNull() || (root.IsScalar() && root.Scalar().empty())) {
        checked_validate(c, origin);
        return c;
    }

    auto& w = c.waveguide;
    auto& P = c.pump;
    auto& pr = c.protocol;
    r.map(root, "",
          {{"preset", [&](auto&, auto&) {}},
           {"seed", [&](auto& v, auto& f) { c.seed = r.integer(v, f); }},
           {"pair_statistics", [&](auto& v, auto& f) {
                auto s = r.text(v, f);
                if (s == "poisson")
                    c.pair_statistics = PairStatistics::poisson;
                else if (s == "thermal")
                    c.pair_statistics = PairStatistics::thermal;
                else
                    r.fail(v, f, "expected poisson or thermal");
            }},
           {"waveguide", [&](auto& n, auto& p) {
                r.map(n, p,
                      {{"length_m", [&](auto& v, auto& f) { w.length_m = r.number(v, f); }},
                       {"group_index", [&](auto& v, auto& f) { w.group_index = r.number(v, f); }},
                       {"reference_group_index", [&](auto& v, auto& f) { w.reference_group_index = r.number(v, f); }},
                       {"gamma0_per_w_m", [&](auto& v, auto& f) { w.gamma0 = r.number(v, f); }},
                       {"beta2_s2_per_m", [&](auto& v, auto& f) { w.beta2 = r.number(v, f); }},
                       {"alpha_db_per_m", [&](auto& v, auto& f) { w.alpha_db_per_m = r.number(v, f); }},
                       {"facet_loss_db", [&](auto& v, auto& f) { w.facet_loss_db = r.number(v, f); }},
                       {"p_sat_w", [&](auto& v, auto& f) { w.p_sat_w = r.number(v, f); }},
                       {"kappa_cal", [&](auto& v, auto& f) { w.kappa_cal = r.number(v, f); }},
                       {"pair_absorption_order", [&](auto& v, auto& f) { w.pair_absorption_order = r.number(v, f); }}});
            }},
           {"pump", [&](auto& n, auto& p) {
                r.map(n, p,
                      {{"rep_rate_hz", [&](auto& v, auto& f) { P.rep_rate_hz = r.number(v, f); }},
                       {"wavelength_m", [&](auto& v, auto& f) { P.wavelength_m = r.number(v, f); }},
                       {"pulse_fwhm_s", [&](auto& v, auto& f) { P.pulse_fwhm_s = r.number(v, f); }},
                       {"peak_power_w", [&](auto& v, auto& f) { P.peak_power_w = r.number(v, f); }}});
            }},
           {"signal", [&](auto& n, auto& p) { c.signal_ch = read_channel(r, n, p, c.signal_ch); }},
           {"idler", [&](auto& n, auto& p) { c.idler_ch = read_channel(r, n, p, c.idler_ch); }},
           {"spd1", [&](auto& n, auto& p) { c.spd1 = read_detector(r, n, p, c.spd1); }},
           {"spd2", [&](auto& n, auto& p) { c.spd2 = read_detector(r, n, p, c.spd2); }},
           {"protocol", [&](auto& n, auto& p) {
                r.map(n, p,
                      {{"laser_rate_hz", [&](auto& v, auto& f) { pr.laser_rate_hz = r.number(v, f); }},
                       {"spd1_rate_hz", [&](auto& v, auto& f) { pr.spd1_rate_hz = r.number(v, f); }},
                       {"gates_total", [&](auto& v, auto& f) { pr.gates_total = r.integer(v, f); }},
                       {"accidental_mode", [&](auto& v, auto& f) {
                            auto s = r.text(v, f);
                            if (s == "delayed-gate")
                                pr.accidental_mode = AccidentalMode::delayed_gate;
                            else if (s == "next-trigger")
                                pr.accidental_mode = AccidentalMode::next_trigger;
                            else
                                r.fail(v, f, "expected delayed-gate or next-trigger");
                        }}});
            }}});
    checked_validate(c, origin);
    return c;
}

void apply_seed_override(SimConfig& c)
{
    const char* s = std::getenv("PAIRSIM_SEED");
    if (!s || !*s)
        return;
    std::uint64_t v = 0;
    std::string str(s);
    auto r = std::from_chars(str.data(), str.data() + str.size(), v);
    if (r.ec != std::errc() || r.ptr != str.data() + str.size())
        throw ConfigError("PAIRSIM_SEED: expected an unsigned integer, got '" + str + "'");
    c.seed = v;
}

SimConfig parse_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw IoError(path + ": cannot open config file");
    std::stringstream ss;
    ss << f.rdbuf();
    SimConfig c = parse_config_text(ss.str(), path);
    apply_seed_override(c);
    return c;
}

// --- emission -----------------------------------------------------------------

namespace {
std::string num(double v) { return format_number(v, 0); }

void emit_channel(YAML::Emitter& e, const ChannelSpec& c)
{
    e << YAML::BeginMap;
    e << YAML::Key << "channel_loss_db" << YAML::Value << num(c.channel_loss_db);
    e << YAML::Key << "detuning_hz" << YAML::Value << num(c.detuning_hz);
    e << YAML::Key << "fbg_suppression_db" << YAML::Value << num(c.fbg_suppression_db);
    e << YAML::Key << "leak_coeff_per_w" << YAML::Value << num(c.leak_coeff_per_w);
    e << YAML::Key << "rolloff" << YAML::Value << YAML::BeginSeq;
    for (auto& s : c.rolloff) {
        e << YAML::BeginMap;
        e << YAML::Key << "name" << YAML::Value << s.name;
        e << YAML::Key << "center_offset_hz" << YAML::Value << num(s.center_offset_hz);
        e << YAML::Key << "fwhm_hz" << YAML::Value << num(s.fwhm_hz);
        e << YAML::Key << "order" << YAML::Value << num(s.order);
        e << YAML::Key << "floor_db" << YAML::Value << num(s.floor_db);
        e << YAML::EndMap;
    }
    e << YAML::EndSeq << YAML::EndMap;
}

void emit_detector(YAML::Emitter& e, const DetectorSpec& d)
{
    e << YAML::BeginMap;
    e << YAML::Key << "dark_prob_per_gate" << YAML::Value << num(d.dark_prob_per_gate);
    e << YAML::Key << "effective_gate_s" << YAML::Value << num(d.effective_gate_s);
    e << YAML::Key << "nominal_gate_s" << YAML::Value << num(d.nominal_gate_s);
    e << YAML::Key << "jitter_fwhm_s" << YAML::Value << num(d.jitter_fwhm_s);
    e << YAML::Key << "jitter_model" << YAML::Value << to_string(d.jitter_model);
    e << YAML::Key << "afterpulse_prob" << YAML::Value << num(d.afterpulse_prob);
    e << YAML::Key << "afterpulse_decay" << YAML::Value << num(d.afterpulse_decay);
    e << YAML::EndMap;
}
} // namespace

void emit_config(YAML::Emitter& e, const SimConfig& c)
{
    auto& w = c.waveguide;
    e << YAML::BeginMap;
    e << YAML::Key << "seed" << YAML::Value << format_number(c.seed);
    e << YAML::Key << "pair_statistics" << YAML::Value << to_string(c.pair_statistics);
    e << YAML::Key << "waveguide" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "length_m" << YAML::Value << num(w.length_m);
    e << YAML::Key << "group_index" << YAML::Value << num(w.group_index);
    e << YAML::Key << "reference_group_index" << YAML::Value << num(w.reference_group_index);
    e << YAML::Key << "gamma0_per_w_m" << YAML::Value << num(w.gamma0);
    e << YAML::Key << "beta2_s2_per_m" << YAML::Value << num(w.beta2);
    e << YAML::Key << "alpha_db_per_m" << YAML::Value << num(w.alpha_db_per_m);
    e << YAML::Key << "facet_loss_db" << YAML::Value << num(w.facet_loss_db);
    e << YAML::Key << "p_sat_w" << YAML::Value << num(w.p_sat_w);
    e << YAML::Key << "kappa_cal" << YAML::Value << num(w.kappa_cal);
    e << YAML::Key << "pair_absorption_order" << YAML::Value << num(w.pair_absorption_order);
    e << YAML::EndMap;
    e << YAML::Key << "pump" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "rep_rate_hz" << YAML::Value << num(c.pump.rep_rate_hz);
    e << YAML::Key << "wavelength_m" << YAML::Value << num(c.pump.wavelength_m);
    e << YAML::Key << "pulse_fwhm_s" << YAML::Value << num(c.pump.pulse_fwhm_s);
    e << YAML::Key << "peak_power_w" << YAML::Value << num(c.pump.peak_power_w);
    e << YAML::EndMap;
    e << YAML::Key << "signal" << YAML::Value;
    emit_channel(e, c.signal_ch);
    e << YAML::Key << "idler" << YAML::Value;
    emit_channel(e, c.idler_ch);
    e << YAML::Key << "spd1" << YAML::Value;
    emit_detector(e, c.spd1);
    e << YAML::Key << "spd2" << YAML::Value;
    emit_detector(e, c.spd2);
    e << YAML::Key << "protocol" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "laser_rate_hz" << YAML::Value << num(c.protocol.laser_rate_hz);
    e << YAML::Key << "spd1_rate_hz" << YAML::Value << num(c.protocol.spd1_rate_hz);
    e << YAML::Key << "accidental_mode" << YAML::Value << to_string(c.protocol.accidental_mode);
    e << YAML::Key << "gates_total" << YAML::Value << format_number(c.protocol.gates_total);
    e << YAML::EndMap;
    e << YAML::EndMap;
}

std::string to_yaml(const SimConfig& c)
{
    YAML::Emitter e;
    emit_config(e, c);
    return std::string(e.c_str()) + "\n";
}

} // namespace pairsim
