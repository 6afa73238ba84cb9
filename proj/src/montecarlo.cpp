#include "pairsim/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <vector>

#include "pairsim/errors.hpp"
#include "pairsim/rng.hpp"

namespace pairsim {

constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

void validate(const SimConfig& c, bool check_reach)
{
    validate(c.waveguide);
    validate(c.pump);
    validate(c.signal_ch, check_reach);
    validate(c.idler_ch, check_reach);
    try {
        validate(c.spd1);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("spd1.") + (e.what() + 9));
    }
    try {
        validate(c.spd2);
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("spd2.") + (e.what() + 9));
    }
    validate(c.protocol);
    if (c.signal_ch.role != ChannelRole::signal || c.idler_ch.role != ChannelRole::idler)
        throw ConfigError("channel roles: expected one signal and one idler channel");
}

GateModel make_gate_model(const SimConfig& c)
{
    GateModel m;
    auto br = pair_rate(c.pump, c.waveguide, c.signal_ch.detuning_hz);
    m.mu = br.mu_pairs_per_pulse;
    m.t1 = channel_transmission(c.signal_ch) * br.photon_survival;
    m.t2 = channel_transmission(c.idler_ch) * br.photon_survival;
    m.pj1 = gate_overlap_probability(c.spd1);
    m.pj2 = gate_overlap_probability(c.spd2);
    m.leak1 = pump_leakage_rate(c.pump.peak_power_w, c.signal_ch);
    m.leak2 = pump_leakage_rate(c.pump.peak_power_w, c.idler_ch);
    m.spd1 = c.spd1;
    m.spd2 = c.spd2;
    m.stats = c.pair_statistics;
    return m;
}

RatePoint make_rate_point(const GateModel& m, const GatingProtocol& p, double eta_s, double eta_i)
{
    RatePoint r;
    r.mu = m.mu;
    r.eta_s = eta_s;
    r.eta_i = eta_i;
    r.onchip_t = eta_s > 0 ? m.t1 / eta_s : 1.0;
    r.d_s = m.spd1.dark_prob_per_gate;
    r.d_i = m.spd2.dark_prob_per_gate;
    r.leak_s = m.leak1;
    r.leak_i = m.leak2;
    r.p_j1 = m.pj1;
    r.p_j2 = m.pj2;
    r.R = p.spd1_rate_hz;
    r.t = static_cast<double>(p.gates_total) / p.spd1_rate_hz;
    r.stats = m.stats;
    return r;
}

RatePoint make_rate_point(const SimConfig& c)
{
    return make_rate_point(make_gate_model(c), c.protocol, channel_transmission(c.signal_ch),
                           channel_transmission(c.idler_ch));
}

bool operator==(const CountsRecord& a, const CountsRecord& b)
{
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.gates == b.gates && a.s1_raw == b.s1_raw && a.s2_raw == b.s2_raw &&
           a.spd2_gates == b.spd2_gates && same(a.dark1, b.dark1) && same(a.dark2, b.dark2) &&
           a.coinc_raw == b.coinc_raw && a.accidental == b.accidental &&
           same(a.coinc_net, b.coinc_net) && same(a.car, b.car) && same(a.car_err, b.car_err) &&
           a.car_defined == b.car_defined;
}

void finalize(CountsRecord& r, const GateModel& m)
{
    r.dark1 = m.spd1.dark_prob_per_gate * static_cast<double>(r.gates);
    r.dark2 = m.spd2.dark_prob_per_gate * static_cast<double>(r.spd2_gates);
    r.coinc_net = static_cast<double>(r.coinc_raw) - static_cast<double>(r.accidental);
    if (r.accidental > 0) {
        r.car_defined = true;
        r.car = r.coinc_net / static_cast<double>(r.accidental);
        double rel = 1.0 / static_cast<double>(r.accidental);
        if (r.coinc_raw > 0)
            rel += 1.0 / static_cast<double>(r.coinc_raw);
        r.car_err = std::abs(r.car) * std::sqrt(rel);
    } else {
        r.car_defined = false;
        r.car = std::numeric_limits<double>::quiet_NaN();
        r.car_err = std::numeric_limits<double>::quiet_NaN();
    }
}

PulseSampler::PulseSampler(const GateModel& m)
    : m_(&m), pairs_(m.stats == PairStatistics::poisson ? m.mu : 0.0), leak1_(m.leak1), leak2_(m.leak2)
{
}

PulseOutcome PulseSampler::operator()(Rng& rng) const
{
    const GateModel& m = *m_;
    PulseOutcome o;
    if (m.mu > 0) {
        if (m.stats == PairStatistics::poisson)
            o.n_pairs = static_cast<unsigned>(pairs_(rng));
        else
            o.n_pairs = static_cast<unsigned>(rng.geometric(1.0 / (1.0 + m.mu)));
    }
    for (unsigned k = 0; k < o.n_pairs; ++k) {
        o.signal_arrivals += rng.bernoulli(m.t1);
        o.idler_arrivals += rng.bernoulli(m.t2);
    }
    o.leak_signal = leak1_(rng);
    o.leak_idler = leak2_(rng);
    return o;
}

PulseOutcome simulate_pulse(const GateModel& m, Rng& rng) { return PulseSampler(m)(rng); }

namespace {

// --- direct per-pulse reference ---------------------------------------------

// after-pulse hazard by gates since the last click, tabulated up to the horizon
struct HazardTable {
    const DetectorSpec* det;
    std::vector<double> hz;

    explicit HazardTable(const DetectorSpec* d) : det(d)
    {
        std::uint64_t hmax = std::min<std::uint64_t>(afterpulse_horizon(*d), 1u << 20);
        hz.resize(hmax + 1);
        for (std::uint64_t t = 0; t <= hmax; ++t)
            hz[t] = afterpulse_hazard(*d, t);
    }

    double operator()(std::uint64_t tau) const
    {
        if (tau < hz.size())
            return hz[tau];
        return det->afterpulse_decay >= 1.0 ? afterpulse_hazard(*det, tau) : 0.0;
    }
};

struct DetState {
    const DetectorSpec* det;
    double pj;
    std::uint64_t last = kNever;
    HazardTable hazard;

    DetState(const DetectorSpec* d, double p) : det(d), pj(p), hazard(d) {}

    bool gate(unsigned arrivals, std::uint64_t leak, std::uint64_t k, Rng& rng)
    {
        bool reg = leak > 0;
        for (unsigned j = 0; j < arrivals; ++j)
            reg |= rng.bernoulli(pj);
        bool dark = rng.bernoulli(det->dark_prob_per_gate);
        double h = last == kNever ? 0.0 : hazard(k - last);
        bool ap = rng.bernoulli(h);
        bool click = reg || dark || ap;
        if (click)
            last = k;
        return click;
    }
};

CountsRecord direct_kernel(const GateModel& m, const GatingProtocol& p, std::uint64_t seed)
{
    CountsRecord r;
    r.gates = p.gates_total;
    const std::uint64_t G = p.gates_total;
    PulseSampler pulse(m);
    {
        Rng rng(derive_seed(seed, 0));
        DetState d1(&m.spd1, m.pj1), d2(&m.spd2, m.pj2);
        for (std::uint64_t k = 0; k < G; ++k) {
            auto o = pulse(rng);
            if (d1.gate(o.signal_arrivals, o.leak_signal, k, rng)) {
                ++r.s1_raw;
                if (d2.gate(o.idler_arrivals, o.leak_idler, k, rng))
                    ++r.coinc_raw;
            }
        }
    }
    {
        Rng rng(derive_seed(seed, 1));
        DetState d1(&m.spd1, m.pj1), d2(&m.spd2, m.pj2);
        if (p.accidental_mode == AccidentalMode::next_trigger) {
            // SPD2 sees pulse 2k+2, which is also SPD1's next gate
            PulseOutcome nxt = pulse(rng);
            for (std::uint64_t k = 0; k < G; ++k) {
                PulseOutcome cur = nxt;
                nxt = pulse(rng);
                if (d1.gate(cur.signal_arrivals, cur.leak_signal, k, rng)) {
                    ++r.spd2_gates;
                    if (d2.gate(nxt.idler_arrivals, nxt.leak_idler, k + 1, rng))
                        ++r.s2_raw;
                }
            }
        } else {
            // SPD2 sees the odd pulse 2k+1 that SPD1 never gates
            for (std::uint64_t k = 0; k < G; ++k) {
                auto cur = pulse(rng);
                if (d1.gate(cur.signal_arrivals, cur.leak_signal, k, rng)) {
                    ++r.spd2_gates;
                    auto odd = pulse(rng);
                    if (d2.gate(odd.idler_arrivals, odd.leak_idler, k, rng))
                        ++r.s2_raw;
                }
            }
        }
        r.accidental = r.s2_raw;
    }
    finalize(r, m);
    return r;
}

// --- event driven kernel ----------------------------------------------------

// inverse-cdf table for the pair number conditioned on the SPD1 outcome
struct CondTable {
    std::vector<double> cdf;
    unsigned sample(double u) const
    {
        for (std::size_t n = 0; n < cdf.size(); ++n)
            if (u <= cdf[n])
                return static_cast<unsigned>(n);
        return static_cast<unsigned>(cdf.size() - 1);
    }
};

struct PairTables {
    CondTable click, quiet;
};

PairTables build_tables(const GateModel& m, double q1)
{
    std::vector<double> pmf;
    double acc = 0.0;
    for (unsigned n = 0; n < 2000; ++n) {
        double pn = pair_pmf(m.mu, n, m.stats);
        pmf.push_back(pn);
        acc += pn;
        if (n > m.mu && (pn < 1e-18 || 1.0 - acc < 1e-17))
            break;
    }
    double a1 = m.a1();
    PairTables t;
    double sc = 0, sq = 0;
    std::vector<double> wc(pmf.size()), wq(pmf.size());
    for (std::size_t n = 0; n < pmf.size(); ++n) {
        double miss = std::pow(1.0 - a1, static_cast<double>(n));
        wq[n] = pmf[n] * miss;
        wc[n] = pmf[n] * (1.0 - miss * q1);
        sc += wc[n];
        sq += wq[n];
    }
    double cc = 0, cq = 0;
    for (std::size_t n = 0; n < pmf.size(); ++n) {
        cc += wc[n];
        cq += wq[n];
        t.click.cdf.push_back(sc > 0 ? cc / sc : 1.0);
        t.quiet.cdf.push_back(sq > 0 ? cq / sq : 1.0);
    }
    t.click.cdf.back() = 1.0;
    t.quiet.cdf.back() = 1.0;
    return t;
}

// first after-pulse gate following a click, by inversion of the survival function
struct AfterpulseClock {
    std::vector<double> surv; // surv[j] = P(no after-pulse in gates 1..j)
    bool constant = false;
    double p_const = 0.0;

    explicit AfterpulseClock(const DetectorSpec& d)
    {
        std::uint64_t H = afterpulse_horizon(d);
        if (H == kNever) {
            constant = true;
            p_const = d.afterpulse_prob;
            return;
        }
        surv.push_back(1.0);
        for (std::uint64_t j = 1; j <= H; ++j)
            surv.push_back(surv.back() * (1.0 - afterpulse_hazard(d, j)));
    }

    // gates after the click at which the next after-pulse fires, or kNever
    std::uint64_t draw(Rng& rng) const
    {
        if (constant) {
            std::uint64_t g = rng.geometric(p_const);
            return g == kNever ? kNever : g + 1;
        }
        if (surv.size() < 2)
            return kNever;
        double u = rng.uniform();
        if (u <= surv.back())
            return kNever;
        // surv is decreasing; first j with surv[j] < u
        std::size_t lo = 1, hi = surv.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (surv[mid] < u)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }
};

std::uint64_t add_sat(std::uint64_t a, std::uint64_t b)
{
    return (b == kNever || a > kNever - b) ? kNever : a + b;
}

struct Spd2Gate {
    HazardTable table;
    double q; // no dark and no leak
    double miss; // 1 - a2
    std::uint64_t last = kNever;

    double hazard(std::uint64_t k) const { return last == kNever ? 0.0 : table(k - last); }
    bool fire(double p_click, std::uint64_t k, Rng& rng)
    {
        bool c = rng.uniform() < p_click;
        if (c)
            last = k;
        return c;
    }
    bool given_n(unsigned n, std::uint64_t k, Rng& rng)
    {
        double none = std::pow(miss, static_cast<double>(n)) * q * (1.0 - hazard(k));
        return fire(1.0 - none, k, rng);
    }
};

template <class OnClick>
void spd1_walk(const GateModel& m, std::uint64_t G, Rng& rng, double p_base, OnClick&& on_click)
{
    AfterpulseClock clock(m.spd1);
    const double lq = std::log1p(-p_base);
    auto skip = [&]() -> std::uint64_t {
        if (p_base >= 1.0)
            return 0;
        if (p_base <= 0.0)
            return kNever;
        return rng.geometric_from_log(lq);
    };
    std::uint64_t next_base = skip();
    std::uint64_t next_ap = kNever;
    for (;;) {
        std::uint64_t ev = std::min(next_base, next_ap);
        if (ev >= G)
            break;
        bool base = ev == next_base;
        if (base)
            next_base = add_sat(ev + 1, skip());
        next_ap = add_sat(ev, clock.draw(rng));
        on_click(ev, base, next_base);
    }
}

CountsRecord event_kernel(const GateModel& m, const GatingProtocol& p, std::uint64_t seed)
{
    CountsRecord r;
    r.gates = p.gates_total;
    const std::uint64_t G = p.gates_total;
    double q1 = std::exp(-m.leak1) * (1.0 - m.spd1.dark_prob_per_gate);
    double q2 = std::exp(-m.leak2) * (1.0 - m.spd2.dark_prob_per_gate);
    double p_base = -std::expm1(std::log(pair_pgf(m.mu, 1.0 - m.a1(), m.stats) * q1));
    PairTables tab = build_tables(m, q1);

    {
        Rng rng(derive_seed(seed, 0));
        Spd2Gate s2{HazardTable(&m.spd2), q2, 1.0 - m.a2()};
        spd1_walk(m, G, rng, p_base, [&](std::uint64_t ev, bool base, std::uint64_t) {
            ++r.s1_raw;
            unsigned n = base ? tab.click.sample(rng.uniform()) : tab.quiet.sample(rng.uniform());
            if (s2.given_n(n, ev, rng))
                ++r.coinc_raw;
        });
    }
    {
        Rng rng(derive_seed(seed, 1));
        Spd2Gate s2{HazardTable(&m.spd2), q2, 1.0 - m.a2()};
        double g2 = pair_pgf(m.mu, 1.0 - m.a2(), m.stats);
        bool next_trigger = p.accidental_mode == AccidentalMode::next_trigger;
        spd1_walk(m, G, rng, p_base, [&](std::uint64_t ev, bool, std::uint64_t next_base) {
            ++r.spd2_gates;
            bool c;
            if (next_trigger) {
                bool nb = next_base == ev + 1;
                unsigned n = nb ? tab.click.sample(rng.uniform()) : tab.quiet.sample(rng.uniform());
                c = s2.given_n(n, ev + 1, rng);
            } else {
                double none = g2 * q2 * (1.0 - s2.hazard(ev));
                c = s2.fire(1.0 - none, ev, rng);
            }
            if (c)
                ++r.s2_raw;
        });
        r.accidental = r.s2_raw;
    }
    finalize(r, m);
    return r;
}

} // namespace

CountsRecord run_counting(const GateModel& m, const GatingProtocol& p, std::uint64_t seed, Kernel k)
{
    return k == Kernel::event ? event_kernel(m, p, seed) : direct_kernel(m, p, seed);
}

CountsRecord run_counting(const SimConfig& cfg, Kernel k)
{
    validate(cfg, false);
    return run_counting(make_gate_model(cfg), cfg.protocol, cfg.seed, k);
}

std::vector<CountsRecord> run_batch(const std::vector<SimConfig>& cfgs, Exec ex, Kernel k)
{
    for (auto& c : cfgs)
        validate(c, false);
    std::vector<CountsRecord> out(cfgs.size());
    const long n = static_cast<long>(cfgs.size());
    if (ex == Exec::serial) {
        for (long i = 0; i < n; ++i)
            out[i] = run_counting(make_gate_model(cfgs[i]), cfgs[i].protocol, cfgs[i].seed, k);
        return out;
    }
    std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = run_counting(make_gate_model(cfgs[i]), cfgs[i].protocol, cfgs[i].seed, k);
        } catch (...) {
#pragma omp critical
            if (!err)
                err = std::current_exception();
        }
    }
    if (err)
        std::rethrow_exception(err);
    return out;
}

std::vector<std::pair<double, CountsRecord>>
estimate_car_curve(const SimConfig& cfg, const std::vector<double>& powers, Exec ex, Kernel k)
{
    if (powers.size() < 2)
        throw ConfigError("estimate_car_curve: need at least 2 powers");
    std::vector<SimConfig> cfgs(powers.size(), cfg);
    for (std::size_t i = 0; i < powers.size(); ++i) {
        cfgs[i].pump.peak_power_w = powers[i];
        cfgs[i].seed = derive_seed(cfg.seed, i);
    }
    auto recs = run_batch(cfgs, ex, k);
    std::vector<std::pair<double, CountsRecord>> out;
    for (std::size_t i = 0; i < powers.size(); ++i)
        out.emplace_back(powers[i], recs[i]);
    return out;
}

} // namespace pairsim
