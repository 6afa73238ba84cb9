#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pairsim {

class Rng;

enum class ChannelRole { signal, idler };

// super-Gaussian filter stage with a finite rejection floor
struct RolloffStage {
    std::string name = "stage";
    double center_offset_hz = 0.0; // stage centre relative to the channel centre
    double fwhm_hz = 0.594e12;
    double order = 2.0;            // exponent is 2*order
    double floor_db = 22.0;        // rejection never exceeds this
};

struct ChannelSpec {
    ChannelRole role = ChannelRole::signal;
    double channel_loss_db = 22.0;
    double detuning_hz = 0.7e12;
    double fbg_suppression_db = 12.0;
    double leak_coeff_per_w = 0.0444;   // leaked photons per gate per W before suppression
    std::vector<RolloffStage> rolloff;
};

enum class JitterModel { gaussian, uniform };

struct DetectorSpec {
    double dark_prob_per_gate = 2e-5;
    double effective_gate_s = 0.5e-9;
    double nominal_gate_s = 2.5e-9;
    double jitter_fwhm_s = 0.7e-9;
    JitterModel jitter_model = JitterModel::uniform;
    double afterpulse_prob = 0.008;
    double afterpulse_decay = 0.5;
};

enum class AccidentalMode { delayed_gate, next_trigger };

struct GatingProtocol {
    double laser_rate_hz = 1e7;
    double spd1_rate_hz = 5e6;
    AccidentalMode accidental_mode = AccidentalMode::delayed_gate;
    std::uint64_t gates_total = 9000000000ULL;
};

constexpr double kAwgReachHz = 0.7e12;

void validate(const ChannelSpec& ch, bool check_reach = true);
void validate(const DetectorSpec& det);
void validate(const GatingProtocol& p);

double db_to_transmission(double db);
double channel_transmission(const ChannelSpec& ch);
double stage_transmission(const RolloffStage& st, double pump_offset_hz);
double total_suppression_db(const ChannelSpec& ch);
double pump_leakage_rate(double p_peak, const ChannelSpec& ch);
double gate_overlap_probability(const DetectorSpec& det);

// after-pulse probability in a gate tau SPD1 periods after the previous click;
// values below kHazardCutoff are dropped
constexpr double kHazardCutoff = 1e-18;
double afterpulse_hazard(const DetectorSpec& det, std::uint64_t tau);
// tau beyond which the hazard is identically zero (UINT64_MAX if it never vanishes)
std::uint64_t afterpulse_horizon(const DetectorSpec& det);

double click_probability(double mean_photons, const DetectorSpec& det, double hazard);
// single-gate detection from one uniform draw
bool detect(double mean_photons, const DetectorSpec& det, bool prior_detection, double u);
bool detect(double mean_photons, const DetectorSpec& det, bool prior_detection, Rng& rng);

const char* to_string(ChannelRole r);
const char* to_string(JitterModel m);
const char* to_string(AccidentalMode m);

} // namespace pairsim
