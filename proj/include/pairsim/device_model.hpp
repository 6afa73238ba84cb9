#pragma once

#include <utility>
#include <vector>

namespace pairsim {

// One photonic-crystal waveguide. SI units throughout.
struct WaveguideSpec {
    double length_m = 196e-6;
    double group_index = 30.0;
    double reference_group_index = 3.0;
    double gamma0 = 5.0;          // 1/(W m), fast-light value
    double beta2 = 1e-21;         // s^2/m
    double alpha_db_per_m = 1e4;  // linear propagation loss
    double facet_loss_db = 3.5;
    double p_sat_w = 4.4336;      // saturation of peak power by TPA/FCA
    double kappa_cal = 164.84;    // pair-rate normalisation
    double pair_absorption_order = 1.0; // on-chip survival of generated photons, (p_eff/P)^k
};

struct PumpSpec {
    double rep_rate_hz = 1e7;
    double wavelength_m = 1554.9e-9;
    double pulse_fwhm_s = 10e-12;
    double peak_power_w = 0.13;
};

struct PairRateBreakdown {
    double mu_pairs_per_pulse = 0.0;
    double gamma_eff = 0.0;
    double l_eff_m = 0.0;
    double phase_match_factor = 1.0;
    double p_eff_w = 0.0;
    double photon_survival = 1.0; // on-chip transmission of each generated photon
};

void validate(const WaveguideSpec& spec);
void validate(const PumpSpec& pump);

double slow_light_enhancement(const WaveguideSpec& spec);
double nepers_per_m(double alpha_db_per_m);
double effective_length(const WaveguideSpec& spec);
double nonlinear_effective_power(double p_peak, const WaveguideSpec& spec);
double phase_matching_factor(double detuning_hz, double p_eff, const WaveguideSpec& spec);
double pair_photon_survival(double p_peak, const WaveguideSpec& spec);
PairRateBreakdown pair_rate(const PumpSpec& pump, const WaveguideSpec& spec, double detuning_hz);

// least-squares propagation loss from insertion losses of several lengths
double infer_alpha(const std::vector<std::pair<double, double>>& insertion_losses_db,
                   double facet_loss_db);

// saturation power solving (p_eff/p)^2 = 1 - drop at power p
double saturation_power_for_drop(double p_w, double drop);

double sinc(double x);

} // namespace pairsim
