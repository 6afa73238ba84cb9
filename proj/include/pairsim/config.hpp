#pragma once

#include <string>
#include <vector>

#include "pairsim/montecarlo.hpp"

namespace YAML {
class Emitter;
}

namespace pairsim {

// calibration targets the presets are built from
struct Calibration {
    double mu_target = 0.004;        // pairs/pulse at the reference point
    double ref_length_m = 196e-6;
    double ref_power_w = 0.13;
    double ref_detuning_hz = 0.7e12;
    double p_sat_96_w = 6.0;         // saturation power of the 96 um guide
    double p_sat_length_exponent = 0.5; // p_sat ~ l_eff^-exponent
    double leak_target = 3e-6;       // leaked photons/gate at leak_ref_power, 0.7 THz
    double leak_ref_power_w = 0.17;
};

const Calibration& calibration();
std::vector<std::string> preset_names();
SimConfig preset(const std::string& name);              // throws ConfigError on unknown name
SimConfig preset_for_length(double length_um);          // nearest of 96/196/396
// swap in the waveguide, power and detuning of the length preset, keep the rest
SimConfig for_length(const SimConfig& base, double length_um);

double insertion_alpha_db_per_m();

SimConfig parse_config(const std::string& path);
SimConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");
// applies PAIRSIM_SEED when set
void apply_seed_override(SimConfig& cfg);

std::string to_yaml(const SimConfig& cfg);
void emit_config(YAML::Emitter& e, const SimConfig& cfg);

} // namespace pairsim
