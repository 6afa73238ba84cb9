#include "pairsim/device_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pairsim/errors.hpp"

namespace pairsim {

namespace {
void require(bool ok, const char* field, const char* what)
{
    if (!ok)
        throw ConfigError(std::string(field) + ": " + what);
}
} // namespace

void validate(const WaveguideSpec& s)
{
    require(s.length_m > 0, "waveguide.length_m", "must be > 0");
    require(s.reference_group_index >= 1, "waveguide.reference_group_index", "must be >= 1");
    require(s.group_index >= s.reference_group_index, "waveguide.group_index",
            "must be >= reference_group_index");
    require(s.gamma0 > 0, "waveguide.gamma0_per_w_m", "must be > 0");
    require(std::isfinite(s.beta2), "waveguide.beta2_s2_per_m", "must be finite");
    require(s.alpha_db_per_m >= 0, "waveguide.alpha_db_per_m", "must be >= 0");
    require(s.facet_loss_db >= 0, "waveguide.facet_loss_db", "must be >= 0");
    require(s.p_sat_w > 0, "waveguide.p_sat_w", "must be > 0");
    require(s.kappa_cal > 0, "waveguide.kappa_cal", "must be > 0");
    require(s.pair_absorption_order >= 0, "waveguide.pair_absorption_order", "must be >= 0");
}

void validate(const PumpSpec& p)
{
    require(p.rep_rate_hz > 0, "pump.rep_rate_hz", "must be > 0");
    require(p.wavelength_m > 0, "pump.wavelength_m", "must be > 0");
    require(p.pulse_fwhm_s > 0, "pump.pulse_fwhm_s", "must be > 0");
    require(p.peak_power_w >= 0, "pump.peak_power_w", "must be >= 0");
}

double slow_light_enhancement(const WaveguideSpec& s)
{
    double r = s.group_index / s.reference_group_index;
    return r * r;
}

double nepers_per_m(double alpha_db_per_m)
{
    return alpha_db_per_m / (10.0 * std::log10(std::numbers::e));
}

double effective_length(const WaveguideSpec& s)
{
    double a = nepers_per_m(s.alpha_db_per_m);
    if (a == 0.0)
        return s.length_m;
    if (std::isinf(a))
        return 0.0;
    return -std::expm1(-a * s.length_m) / a;
}

double nonlinear_effective_power(double p_peak, const WaveguideSpec& s)
{
    if (std::isinf(s.p_sat_w))
        return p_peak;
    return p_peak / (1.0 + p_peak / s.p_sat_w);
}

double sinc(double x)
{
    if (std::abs(x) < 1e-8)
        return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double phase_matching_factor(double detuning_hz, double p_eff, const WaveguideSpec& s)
{
    double om = 2.0 * std::numbers::pi * detuning_hz;
    double g = s.gamma0 * slow_light_enhancement(s);
    double dbeta = s.beta2 * om * om + 2.0 * g * p_eff;
    double sc = sinc(0.5 * dbeta * s.length_m);
    return sc * sc;
}

double pair_photon_survival(double p_peak, const WaveguideSpec& s)
{
    if (p_peak <= 0.0 || s.pair_absorption_order == 0.0)
        return 1.0;
    return std::pow(nonlinear_effective_power(p_peak, s) / p_peak, s.pair_absorption_order);
}

PairRateBreakdown pair_rate(const PumpSpec& pump, const WaveguideSpec& s, double detuning_hz)
{
    PairRateBreakdown b;
    b.gamma_eff = s.gamma0 * slow_light_enhancement(s);
    b.l_eff_m = effective_length(s);
    b.p_eff_w = nonlinear_effective_power(pump.peak_power_w, s);
    b.phase_match_factor = phase_matching_factor(detuning_hz, b.p_eff_w, s);
    double x = b.gamma_eff * b.p_eff_w * b.l_eff_m;
    b.mu_pairs_per_pulse = s.kappa_cal * x * x * b.phase_match_factor;
    b.photon_survival = pair_photon_survival(pump.peak_power_w, s);
    return b;
}

double infer_alpha(const std::vector<std::pair<double, double>>& pts, double facet_loss_db)
{
    if (pts.size() < 2)
        throw ConfigError("infer_alpha: need at least two (length, loss) entries");
    double n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (auto& [L, dB] : pts) {
        mx += L;
        my += dB - 2.0 * facet_loss_db;
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (auto& [L, dB] : pts) {
        sxx += (L - mx) * (L - mx);
        sxy += (L - mx) * (dB - 2.0 * facet_loss_db - my);
    }
    if (sxx <= 1e-30 * (mx * mx + 1e-300))
        throw ConfigError("infer_alpha: all lengths equal, slope undefined");
    return sxy / sxx;
}

double saturation_power_for_drop(double p_w, double drop)
{
    return p_w / (std::sqrt(1.0 / (1.0 - drop)) - 1.0);
}

} // namespace pairsim
