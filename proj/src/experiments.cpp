#include "pairsim/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "pairsim/canonical.hpp"
#include "pairsim/csv.hpp"
#include "pairsim/rng.hpp"

namespace pairsim {

const char* to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::power: return "power";
    case SweepAxis::detuning: return "detuning";
    default: return "length";
    }
}

double FitResult::eval(double x) const
{
    if (model == "quadratic")
        return params.at(0) * x * x;
    return params.at(0) * std::pow(x, params.at(1));
}

DerivedMetrics derive_metrics(const CountsRecord& r, const SimConfig& cfg)
{
    DerivedMetrics d;
    d.car = r.car;
    d.car_err = r.car_err;
    d.coinc_net = r.coinc_net;
    double eta = channel_transmission(cfg.signal_ch);
    double t = static_cast<double>(r.gates) / cfg.protocol.spd1_rate_hz;
    auto mu = infer_mu1_mu2(static_cast<double>(r.s1_raw), r.dark1, r.coinc_net, t, eta,
                            cfg.protocol.spd1_rate_hz);
    d.mu1 = mu.mu1;
    d.mu2 = mu.mu2;
    if (mu.mu2 > 0 && mu.mu1 > 0) {
        d.mu_ratio = mu.mu1 / mu.mu2;
        double s = static_cast<double>(r.s1_raw);
        double rel1 = std::sqrt(s) / (s - r.dark1);
        double rel2 = std::sqrt(static_cast<double>(r.coinc_raw + r.accidental)) / r.coinc_net;
        d.mu_ratio_err = d.mu_ratio * std::hypot(rel1, rel2);
    } else {
        d.mu_ratio = std::numeric_limits<double>::quiet_NaN();
        d.mu_ratio_err = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
}

FitResult fit_quadratic(std::vector<std::pair<double, double>> pts, bool poisson_weights)
{
    if (pts.size() < 2)
        throw ConfigError("fit_quadratic: need at least 2 points");
    for (auto& p : pts)
        if (!(p.first > 0))
            throw ConfigError("fit_quadratic: powers must be > 0");
    std::sort(pts.begin(), pts.end());

    auto amplitude = [&](std::size_t n, double& sxx) {
        double sxy = 0;
        sxx = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double x2 = pts[i].first * pts[i].first;
            double w = poisson_weights ? 1.0 / std::max(std::abs(pts[i].second), 1.0) : 1.0;
            sxy += w * x2 * pts[i].second;
            sxx += w * x2 * x2;
        }
        return sxy / sxx;
    };

    FitResult f;
    f.model = "quadratic";
    double sxx;
    double a = amplitude(pts.size(), sxx);
    double rss = 0;
    for (auto& [x, y] : pts)
        rss += (y - a * x * x) * (y - a * x * x);
    f.params = {a};
    f.residual_norm = std::sqrt(rss);
    double dof = static_cast<double>(pts.size()) - 1.0;
    f.cov_diag = {dof > 0 ? rss / dof / sxx : 0.0};

    // deviation onset: amplitude from the low-power half, then the first power
    // from which every point sits more than 10% below a*P^2
    std::size_t nlow = std::max<std::size_t>(2, pts.size() / 2);
    double sl;
    double alow = amplitude(nlow, sl);
    std::size_t j = pts.size();
    while (j > 0 && pts[j - 1].second < 0.9 * alow * pts[j - 1].first * pts[j - 1].first)
        --j;
    if (j < pts.size()) {
        f.has_onset = true;
        f.onset = pts[j].first;
    }
    return f;
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& pts)
{
    if (pts.size() < 2)
        throw ConfigError("fit_power_law: need at least 2 points");
    double n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (auto& [x, y] : pts) {
        if (!(x > 0) || !(y > 0))
            throw ConfigError("fit_power_law: values must be positive");
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
        sxx += (std::log(x) - mx) * (std::log(x) - mx);
        sxy += (std::log(x) - mx) * (std::log(y) - my);
    }
    if (sxx == 0.0)
        throw ConfigError("fit_power_law: abscissae all equal");
    double b = sxy / sxx;
    double lna = my - b * mx;
    double rss = 0;
    for (auto& [x, y] : pts) {
        double r = std::log(y) - lna - b * std::log(x);
        rss += r * r;
    }
    FitResult f;
    f.model = "power-law";
    f.params = {std::exp(lna), b};
    f.exponent = b;
    f.residual_norm = std::sqrt(rss);
    double s2 = pts.size() > 2 ? rss / (n - 2.0) : 0.0;
    f.cov_diag = {s2 * (1.0 / n + mx * mx / sxx), s2 / sxx}; // ln(prefactor), exponent
    return f;
}

MaxCar max_car_of(const std::vector<std::pair<double, CountsRecord>>& curve)
{
    if (curve.size() < 3)
        throw ConfigError("find_max_car: need at least 3 grid points");
    for (auto& [P, r] : curve)
        if (!r.car_defined)
            throw DegenerateError("find_max_car: no accidentals at P = " + std::to_string(P) +
                                  " W; increase gates_total");
    std::size_t k = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].second.car > curve[k].second.car)
            k = i;
    if (k == 0 || k + 1 == curve.size())
        throw BoundaryError("find_max_car: maximum on the grid boundary at P = " +
                            std::to_string(curve[k].first) + " W; widen the power grid");
    return {curve[k].first, curve[k].second.car, curve[k].second, k};
}

MaxCar find_max_car(const SimConfig& cfg, const std::vector<double>& grid, Exec ex)
{
    std::vector<double> g = grid;
    std::sort(g.begin(), g.end());
    if (g.size() < 3)
        throw ConfigError("find_max_car: need at least 3 grid points");
    return max_car_of(estimate_car_curve(cfg, g, ex));
}

namespace {
SweepResult run_points(SweepAxis axis, const SimConfig& base, std::vector<double> xs,
                       std::vector<SimConfig> cfgs, Exec ex)
{
    for (std::size_t i = 0; i < cfgs.size(); ++i)
        cfgs[i].seed = derive_seed(base.seed, i);
    auto recs = run_batch(cfgs, ex);
    SweepResult s;
    s.axis = axis;
    s.config_hash = hash_hex(config_hash(base));
    s.seed = base.seed;
    for (std::size_t i = 0; i < xs.size(); ++i)
        s.points.push_back({xs[i], recs[i], derive_metrics(recs[i], cfgs[i])});
    return s;
}
} // namespace

SimConfig with_detuning(SimConfig c, double d)
{
    c.signal_ch.detuning_hz = d;
    c.idler_ch.detuning_hz = d;
    return c;
}

SimConfig with_power(SimConfig c, double p)
{
    c.pump.peak_power_w = p;
    return c;
}

SweepResult power_sweep(const SimConfig& cfg, std::vector<double> powers, Exec ex)
{
    std::sort(powers.begin(), powers.end());
    std::vector<SimConfig> cfgs;
    for (double p : powers)
        cfgs.push_back(with_power(cfg, p));
    return run_points(SweepAxis::power, cfg, powers, cfgs, ex);
}

SweepResult detuning_sweep(const SimConfig& cfg, std::vector<double> det, Exec ex)
{
    std::sort(det.begin(), det.end());
    std::vector<SimConfig> cfgs;
    for (double d : det)
        cfgs.push_back(with_detuning(cfg, d));
    return run_points(SweepAxis::detuning, cfg, det, cfgs, ex);
}

SweepResult length_sweep(std::vector<SimConfig> cfgs, Exec ex)
{
    if (cfgs.empty())
        throw ConfigError("length_sweep: no configurations");
    std::sort(cfgs.begin(), cfgs.end(), [](const SimConfig& a, const SimConfig& b) {
        return a.waveguide.length_m < b.waveguide.length_m;
    });
    std::vector<double> xs;
    for (auto& c : cfgs)
        xs.push_back(c.waveguide.length_m);
    return run_points(SweepAxis::length, cfgs.front(), xs, cfgs, ex);
}

SweepResult mu_ratio_experiment(const SimConfig& cfg, std::vector<double> powers, Exec ex)
{
    if (powers.size() < 4)
        throw ConfigError("mu_ratio_experiment: need at least 4 powers");
    return power_sweep(cfg, std::move(powers), ex);
}

MuRatioSummary summarize_mu_ratio(const SweepResult& r)
{
    MuRatioSummary s;
    std::size_t k = r.points.size();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        double v = r.points[i].m.mu_ratio;
        if (std::isnan(v))
            throw DegenerateError("mu ratio undefined at point " + std::to_string(i));
        if (k == r.points.size() || v < r.points[k].m.mu_ratio)
            k = i;
    }
    if (k == r.points.size())
        throw DegenerateError("mu ratio: empty sweep");
    s.p_min = r.points[k].x;
    s.ratio_min = r.points[k].m.mu_ratio;
    s.ratio_err = r.points[k].m.mu_ratio_err;
    s.interior = k > 0 && k + 1 < r.points.size();
    return s;
}

double half_max_detuning(const SimConfig& cfg, double max_hz, double step_hz)
{
    SimConfig c = cfg;
    c.signal_ch.leak_coeff_per_w = 0.0;
    c.idler_ch.leak_coeff_per_w = 0.0;
    auto net = [&](double d) { return expected_counts(make_rate_point(with_detuning(c, d))).coinc_net; };
    double peak = net(0.0);
    if (!(peak > 0))
        throw DegenerateError("half_max_detuning: no correlated signal");
    double prev = peak;
    for (double d = step_hz; d <= max_hz + 0.5 * step_hz; d += step_hz) {
        double v = net(d);
        if (v < 0.5 * peak) {
            double f = (prev - 0.5 * peak) / (prev - v);
            return d - step_hz + f * step_hz;
        }
        prev = v;
    }
    throw DegenerateError("half_max_detuning: no half-maximum crossing below max_hz");
}

SimConfig ideal_config(SimConfig c, bool keep_channel_loss)
{
    for (auto* d : {&c.spd1, &c.spd2}) {
        d->dark_prob_per_gate = 0;
        d->afterpulse_prob = 0;
        d->jitter_fwhm_s = 0;
    }
    for (auto* ch : {&c.signal_ch, &c.idler_ch}) {
        ch->leak_coeff_per_w = 0;
        if (!keep_channel_loss)
            ch->channel_loss_db = 0;
    }
    c.waveguide.alpha_db_per_m = 0;
    c.waveguide.p_sat_w = std::numeric_limits<double>::infinity();
    c.waveguide.beta2 = 0;
    c.waveguide.pair_absorption_order = 0;
    return c;
}

std::vector<double> linear_grid(double lo, double hi, double step)
{
    std::vector<double> g;
    long n = std::lround(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i)
        g.push_back(std::stod(format_number(lo + i * step, 12)));
    return g;
}

} // namespace pairsim
