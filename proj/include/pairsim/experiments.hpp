#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pairsim/errors.hpp"
#include "pairsim/montecarlo.hpp"

namespace pairsim {

// grid maximum sits on an end point
struct BoundaryError : DegenerateError {
    using DegenerateError::DegenerateError;
};

enum class SweepAxis { power, detuning, length };
const char* to_string(SweepAxis a);

struct DerivedMetrics {
    double car = 0, car_err = 0;
    double coinc_net = 0;
    double mu1 = 0, mu2 = 0;
    double mu_ratio = 0, mu_ratio_err = 0;
};

struct SweepPoint {
    double x = 0;
    CountsRecord rec;
    DerivedMetrics m;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::power;
    std::vector<SweepPoint> points;
    std::string config_hash;
    std::uint64_t seed = 0;
};

struct FitResult {
    std::string model;          // "quadratic" or "power-law"
    std::vector<double> params; // quadratic: {a}; power-law: {prefactor, exponent}
    double exponent = 2.0;
    double residual_norm = 0.0;
    std::vector<double> cov_diag;
    double onset = std::numeric_limits<double>::quiet_NaN(); // power 10% below the fit
    bool has_onset = false;

    double eval(double x) const;
};

DerivedMetrics derive_metrics(const CountsRecord& r, const SimConfig& cfg);

FitResult fit_quadratic(std::vector<std::pair<double, double>> pts, bool poisson_weights = false);
FitResult fit_power_law(const std::vector<std::pair<double, double>>& pts);

struct MaxCar {
    double p_opt = 0, car_max = 0;
    CountsRecord record;
    std::size_t index = 0;
};
MaxCar max_car_of(const std::vector<std::pair<double, CountsRecord>>& curve);
MaxCar find_max_car(const SimConfig& cfg, const std::vector<double>& power_grid,
                    Exec ex = Exec::parallel);

SweepResult power_sweep(const SimConfig& cfg, std::vector<double> powers, Exec ex = Exec::parallel);
SweepResult detuning_sweep(const SimConfig& cfg, std::vector<double> detunings,
                           Exec ex = Exec::parallel);
SweepResult length_sweep(std::vector<SimConfig> cfgs, Exec ex = Exec::parallel);
SweepResult mu_ratio_experiment(const SimConfig& cfg, std::vector<double> powers,
                                Exec ex = Exec::parallel);

struct MuRatioSummary {
    double p_min = 0, ratio_min = 0, ratio_err = 0;
    bool interior = false;
};
MuRatioSummary summarize_mu_ratio(const SweepResult& r);

// set both channels to the same detuning
SimConfig with_detuning(SimConfig cfg, double detuning_hz);
SimConfig with_power(SimConfig cfg, double p_w);

// analytic half-maximum detuning of coinc_net with leakage removed
double half_max_detuning(const SimConfig& cfg, double max_hz = 2e12, double step_hz = 1e9);

// zero every noise and loss mechanism; keep_channel_loss leaves the 22 dB budget
SimConfig ideal_config(SimConfig cfg, bool keep_channel_loss);

std::vector<double> linear_grid(double lo, double hi, double step);

} // namespace pairsim
