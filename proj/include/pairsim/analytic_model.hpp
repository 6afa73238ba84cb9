#pragma once

#include <utility>
#include <vector>

namespace pairsim {

enum class PairStatistics { poisson, thermal };

const char* to_string(PairStatistics s);

// per-gate inputs of the counting statistics
struct RatePoint {
    double mu = 0.0;
    double eta_s = 1.0, eta_i = 1.0;   // channel transmissions
    double onchip_t = 1.0;             // extra on-chip survival of each generated photon
    double d_s = 0.0, d_i = 0.0;
    double leak_s = 0.0, leak_i = 0.0; // registered leak photons per gate
    double p_j1 = 1.0, p_j2 = 1.0;
    double R = 5e6;
    double t = 1800.0;
    PairStatistics stats = PairStatistics::poisson;
};

struct ExpectedCounts {
    double singles_s = 0, singles_i = 0;
    double coinc_raw = 0, accidental = 0, coinc_net = 0, car = 0;
    bool car_defined = false;
};

void validate(const RatePoint& pt);

// pair-number generating function E[z^n]
double pair_pgf(double mu, double z, PairStatistics s);
double pair_pmf(double mu, unsigned n, PairStatistics s);

double signal_registration(const RatePoint& pt); // a_s, per photon
double idler_registration(const RatePoint& pt);

ExpectedCounts expected_counts(const RatePoint& pt);
double ideal_car(double mu);

struct MuPair {
    double mu1, mu2;
};
MuPair infer_mu1_mu2(double S_raw, double D, double C_net, double t, double eta, double R);
MuPair infer_mu1_mu2(double S_raw, double D, double C_net, const RatePoint& pt);

struct MuRatioCurve {
    std::vector<std::pair<double, double>> ratio; // (power, mu1/mu2)
    double p_min = 0, ratio_min = 0;
    bool interior = false;
};
MuRatioCurve mu_ratio_curve(const std::vector<std::pair<double, RatePoint>>& points);

} // namespace pairsim
