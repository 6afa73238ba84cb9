#include "pairsim/analytic_model.hpp"

#include <cmath>

#include "pairsim/errors.hpp"

namespace pairsim {

const char* to_string(PairStatistics s) { return s == PairStatistics::poisson ? "poisson" : "thermal"; }

void validate(const RatePoint& p)
{
    auto prob = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!(p.mu >= 0))
        throw ConfigError("rate point: mu must be >= 0");
    if (!prob(p.eta_s) || !prob(p.eta_i) || !prob(p.onchip_t))
        throw ConfigError("rate point: transmissions must lie in [0,1]");
    if (!prob(p.d_s) || !prob(p.d_i) || !prob(p.p_j1) || !prob(p.p_j2))
        throw ConfigError("rate point: probabilities must lie in [0,1]");
    if (!(p.leak_s >= 0) || !(p.leak_i >= 0))
        throw ConfigError("rate point: leak rates must be >= 0");
    if (!(p.R > 0) || !(p.t > 0))
        throw ConfigError("rate point: R and t must be > 0");
}

double pair_pgf(double mu, double z, PairStatistics s)
{
    if (s == PairStatistics::poisson)
        return std::exp(mu * (z - 1.0));
    return 1.0 / (1.0 + mu * (1.0 - z));
}

double pair_pmf(double mu, unsigned n, PairStatistics s)
{
    if (mu == 0.0)
        return n == 0 ? 1.0 : 0.0;
    if (s == PairStatistics::poisson)
        return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0));
    return std::pow(mu / (1.0 + mu), n) / (1.0 + mu);
}

double signal_registration(const RatePoint& p) { return p.eta_s * p.onchip_t * p.p_j1; }
double idler_registration(const RatePoint& p) { return p.eta_i * p.onchip_t * p.p_j2; }

ExpectedCounts expected_counts(const RatePoint& p)
{
    validate(p);
    double as = signal_registration(p), ai = idler_registration(p);
    double qs = std::exp(-p.leak_s) * (1.0 - p.d_s);
    double qi = std::exp(-p.leak_i) * (1.0 - p.d_i);

    // probabilities of no click, alone and jointly
    double ns = pair_pgf(p.mu, 1.0 - as, p.stats) * qs;
    double ni = pair_pgf(p.mu, 1.0 - ai, p.stats) * qi;
    double nb = pair_pgf(p.mu, (1.0 - as) * (1.0 - ai), p.stats) * qs * qi;

    ExpectedCounts e;
    e.singles_s = -std::expm1(std::log(ns));
    e.singles_i = -std::expm1(std::log(ni));
    e.accidental = e.singles_s * e.singles_i;
    // true correlations: nb - ns*ni, kept in a cancellation-free form where possible
    double corr;
    if (p.stats == PairStatistics::poisson)
        corr = ns * ni * std::expm1(p.mu * as * ai);
    else
        corr = nb - ns * ni;
    e.coinc_net = corr;
    e.coinc_raw = e.accidental + corr;
    if (e.accidental > 0) {
        e.car = e.coinc_net / e.accidental;
        e.car_defined = true;
    }
    return e;
}

double ideal_car(double mu)
{
    if (!(mu > 0))
        throw ConfigError("ideal_car: mu must be > 0");
    return 1.0 / mu;
}

MuPair infer_mu1_mu2(double S_raw, double D, double C_net, double t, double eta, double R)
{
    double den = t * eta * R;
    if (!(den != 0.0))
        throw DegenerateError("infer_mu1_mu2: t*eta*R is zero");
    return {(S_raw - D) / den, C_net / (den * eta)};
}

MuPair infer_mu1_mu2(double S_raw, double D, double C_net, const RatePoint& pt)
{
    return infer_mu1_mu2(S_raw, D, C_net, pt.t, pt.eta_s, pt.R);
}

MuRatioCurve mu_ratio_curve(const std::vector<std::pair<double, RatePoint>>& pts)
{
    if (pts.size() < 3)
        throw ConfigError("mu_ratio_curve: need at least 3 points");
    MuRatioCurve c;
    for (auto& [P, pt] : pts) {
        auto e = expected_counts(pt);
        double gates = pt.t * pt.R;
        auto m = infer_mu1_mu2(e.singles_s * gates, pt.d_s * gates, e.coinc_net * gates, pt);
        if (!(m.mu2 > 0))
            throw DegenerateError("mu_ratio_curve: mu2 vanishes");
        c.ratio.emplace_back(P, m.mu1 / m.mu2);
    }
    std::size_t k = 0;
    for (std::size_t j = 1; j < c.ratio.size(); ++j)
        if (c.ratio[j].second < c.ratio[k].second)
            k = j;
    c.p_min = c.ratio[k].first;
    c.ratio_min = c.ratio[k].second;
    c.interior = k > 0 && k + 1 < c.ratio.size();
    return c;
}

} // namespace pairsim
