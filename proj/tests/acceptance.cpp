// acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails

#include <algorithm>
#include <array>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "pairsim/config.hpp"
#include "pairsim/errors.hpp"
#include "pairsim/experiments.hpp"
#include "pairsim/reproduce.hpp"

using namespace pairsim;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool ok;
    std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...)
{
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// --- independent oracle: truncated enumeration over pair and photon numbers ---

double binom(unsigned n, unsigned k, double p)
{
    double c = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
    return c * std::pow(p, k) * std::pow(1 - p, n - k);
}

struct Oracle {
    double s1, s2, both;
};

Oracle enumerate(const GateModel& m, unsigned nmax = 10)
{
    double q1 = std::exp(-m.leak1) * (1 - m.spd1.dark_prob_per_gate);
    double q2 = std::exp(-m.leak2) * (1 - m.spd2.dark_prob_per_gate);
    Oracle o{0, 0, 0};
    for (unsigned n = 0; n <= nmax; ++n) {
        double pn = std::exp(-m.mu) * std::pow(m.mu, n) / std::tgamma(n + 1.0);
        for (unsigned k1 = 0; k1 <= n; ++k1)
            for (unsigned k2 = 0; k2 <= n; ++k2) {
                double w = pn * binom(n, k1, m.t1) * binom(n, k2, m.t2);
                double c1 = 1 - std::pow(1 - m.pj1, k1) * q1;
                double c2 = 1 - std::pow(1 - m.pj2, k2) * q2;
                o.s1 += w * c1;
                o.s2 += w * c2;
                o.both += w * c1 * c2;
            }
    }
    return o;
}

// --- helpers --------------------------------------------------------------

struct Run {
    int code;
    std::string out;
};

Run sh(const std::string& cmd)
{
    Run r{0, {}};
    FILE* p = popen((cmd + " 2>&1").c_str(), "r");
    if (!p)
        return {-1, "popen failed"};
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), buf.size(), p))
        r.out += buf.data();
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<fs::path> csvs(const fs::path& dir)
{
    std::vector<fs::path> v;
    for (auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv")
            v.push_back(e.path().filename());
    std::sort(v.begin(), v.end());
    return v;
}

SimConfig with_gates(SimConfig c, std::uint64_t g)
{
    c.protocol.gates_total = g;
    return c;
}

double local_slope(const std::vector<std::pair<double, double>>& pts)
{
    return fit_power_law(pts).exponent;
}

// --- criteria -------------------------------------------------------------

Verdict c1()
{
    double v = ideal_car(0.004);
    return {v == 250.0, fmt("ideal_car(0.004) = %.17g", v)};
}

Verdict c2()
{
    RatePoint pt;
    pt.mu = 0.004;
    pt.eta_s = pt.eta_i = std::pow(10.0, -2.2);
    pt.d_s = 2e-5;
    pt.d_i = 4e-5;
    auto e = expected_counts(pt);
    return {e.car_defined && e.car >= 43 && e.car <= 59, fmt("CAR = %.4f (band [43, 59])", e.car)};
}

Verdict c3()
{
    auto m = infer_mu1_mu2(0, 0, 1217, 1800, std::pow(10.0, -2.2), 5e6);
    return {std::abs(m.mu2 - 0.0034) <= 0.0001, fmt("mu2 = %.6f (0.0034 +- 0.0001)", m.mu2)};
}

Verdict c4()
{
    auto c = with_gates(preset("paper-96um"), 1000000000000ULL);
    // low-power slope
    auto low = power_sweep(c, linear_grid(0.05, 0.3, 0.05));
    std::vector<std::pair<double, double>> lp;
    for (auto& p : low.points)
        lp.emplace_back(p.x, p.m.coinc_net);
    double slope = local_slope(lp);

    // deviation onset over the full range
    auto full = power_sweep(with_gates(c, 100000000000ULL), linear_grid(0.05, 1.0, 0.05));
    std::vector<std::pair<double, double>> fp;
    for (auto& p : full.points)
        fp.emplace_back(p.x, p.m.coinc_net);
    auto f = fit_quadratic(fp);
    bool ok = std::abs(slope - 2.0) <= 0.1 && f.has_onset && std::abs(f.onset - 0.5) <= 0.15;
    return {ok, fmt("slope(P<=0.3 W) = %.3f (2.0 +- 0.1), onset = %s W (0.5 +- 0.15)", slope,
                    f.has_onset ? format_number(f.onset, 3).c_str() : "none")};
}

// CAR rises to a single peak and falls, within 3 sigma of each pairwise comparison
bool unimodal(const std::vector<std::pair<double, CountsRecord>>& cv, std::size_t k)
{
    for (std::size_t i = 0; i < cv.size(); ++i)
        for (std::size_t j = i + 1; j < cv.size(); ++j) {
            double s = 3 * std::hypot(cv[i].second.car_err, cv[j].second.car_err);
            double a = cv[i].second.car, b = cv[j].second.car;
            if (j <= k && a > b + s)
                return false;
            if (i >= k && b > a + s)
                return false;
        }
    return true;
}

const std::uint64_t kMaxCarGates = 1000000000000ULL;

std::vector<double> max_car_grid() { return linear_grid(0.05, 0.41, 0.02); }

// the 96 um curve is shared by criteria 5 and 8
const std::vector<std::pair<double, CountsRecord>>& car_curve_96()
{
    static const auto curve = estimate_car_curve(with_gates(preset("paper-96um"), kMaxCarGates), max_car_grid());
    return curve;
}

Verdict c5()
{
    // the offset curve sits far below, so a tenth of the gates resolves it
    auto off = with_gates(preset("paper-96um"), kMaxCarGates / 10);
    off.signal_ch.fbg_suppression_db = off.idler_ch.fbg_suppression_db = 0;
    const auto& a = car_curve_96();
    auto b = estimate_car_curve(off, max_car_grid());
    auto ma = max_car_of(a);
    double mb = 0;
    for (auto& [P, r] : b)
        mb = std::max(mb, r.car);
    bool ok = ma.index > 0 && ma.index + 1 < a.size() && unimodal(a, ma.index) && ma.car_max >= 20 &&
              ma.car_max <= 34 && std::abs(ma.p_opt - 0.17) <= 0.05 && mb < ma.car_max;
    return {ok, fmt("aligned max CAR %.2f +- %.2f at %.2f W, unimodal %s; offset max %.2f", ma.car_max,
                    ma.record.car_err, ma.p_opt, unimodal(a, ma.index) ? "yes" : "no", mb)};
}

Verdict c6()
{
    std::vector<double> hm, L{96, 196, 396};
    for (double l : L)
        hm.push_back(half_max_detuning(with_power(preset_for_length(l), 1e-3)));
    double worst = 0;
    for (std::size_t i = 0; i < 3; ++i)
        worst = std::max(worst, std::abs(hm[i] * std::sqrt(L[i]) / (hm[0] * std::sqrt(L[0])) - 1));
    bool ok = worst <= 0.05 && std::abs(hm[2] / 1e12 - 0.42) <= 0.3 * 0.42;
    return {ok, fmt("half-max %.3f / %.3f / %.3f THz, max deviation from L^-1/2 %.2f%%", hm[0] / 1e12,
                    hm[1] / 1e12, hm[2] / 1e12, 100 * worst)};
}

Verdict c7()
{
    std::vector<std::pair<double, double>> pts, ideal;
    std::vector<double> errs;
    std::size_t i = 0;
    for (double L : {96.0, 196.0, 396.0}) {
        auto c = with_gates(with_power(preset_for_length(L), 0.34), 2000000000000ULL);
        c.seed = derive_seed(c.seed, 700 + i++);
        auto r = run_counting(c);
        pts.emplace_back(L, r.car);
        errs.push_back(r.car_err);
        auto z = ideal_config(with_power(preset_for_length(L), 0.34), true);
        ideal.emplace_back(L, expected_counts(make_rate_point(z)).car);
    }
    double e = fit_power_law(pts).exponent, ei = fit_power_law(ideal).exponent;
    bool ok = e >= -1.0 && e <= -0.3 && std::abs(ei + 2.0) <= 0.05;
    return {ok, fmt("CAR(0.34 W) = %.2f/%.2f/%.2f, exponent %.3f ([-1, -0.3]); ideal exponent %.3f", pts[0].second,
                    pts[1].second, pts[2].second, e, ei)};
}

Verdict c8()
{
    std::vector<MaxCar> mx;
    std::vector<double> L{96, 196, 396};
    mx.push_back(max_car_of(car_curve_96()));
    for (double l : {196.0, 396.0})
        mx.push_back(find_max_car(with_gates(preset_for_length(l), kMaxCarGates), max_car_grid()));
    bool consistent = true;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            consistent &= std::abs(mx[i].car_max - mx[j].car_max) <=
                          2 * std::hypot(mx[i].record.car_err, mx[j].record.car_err);
    // 96 and 196 um share the same optimum to within one grid step, so their order is read with the 0.05 W tolerance
    bool trend = mx[0].p_opt > mx[2].p_opt && mx[1].p_opt <= mx[0].p_opt + 0.05 && mx[1].p_opt >= mx[2].p_opt - 0.05;
    bool bands = std::abs(mx[0].p_opt - 0.17) <= 0.05 && std::abs(mx[2].p_opt - 0.13) <= 0.05;
    return {consistent && trend && bands,
            fmt("CAR_max %.2f+-%.2f / %.2f+-%.2f / %.2f+-%.2f, P_opt %.2f / %.2f / %.2f W", mx[0].car_max,
                mx[0].record.car_err, mx[1].car_max, mx[1].record.car_err, mx[2].car_max, mx[2].record.car_err,
                mx[0].p_opt, mx[1].p_opt, mx[2].p_opt)};
}

Verdict c9()
{
    auto c = with_gates(preset("paper-196um"), 100000000000ULL);
    std::vector<double> powers{0.05, 0.09, 0.13, 0.17, 0.22, 0.26, 0.34, 0.43, 0.52, 0.65, 0.8, 1.0, 1.2};
    auto s = summarize_mu_ratio(mu_ratio_experiment(c, powers));

    auto z = with_gates(ideal_config(preset("paper-196um"), false), 20000000);
    auto r = mu_ratio_experiment(z, {0.01, 0.02, 0.03, 0.05});
    bool ideal = true;
    double worst = 0;
    for (auto& p : r.points) {
        double d = std::abs(p.m.mu_ratio - 1) / p.m.mu_ratio_err;
        worst = std::max(worst, d);
        ideal &= d <= 3;
    }
    bool ok = s.interior && s.ratio_min >= 1.5 && s.ratio_min <= 4 && ideal;
    return {ok, fmt("min mu1/mu2 = %.2f +- %.2f at %.2f W (interior %s); ideal |ratio-1| <= %.2f sigma",
                    s.ratio_min, s.ratio_err, s.p_min, s.interior ? "yes" : "no", worst)};
}

Verdict c10()
{
    int bad = 0, n = 0;
    double worst = 0;
    auto base = preset("paper-96um");
    std::size_t idx = 0;
    for (double mu : {0.005, 0.02, 0.05})
        for (double P : {0.1, 0.3, 0.6}) {
            auto cfg = with_power(base, P);
            cfg.spd1.afterpulse_prob = cfg.spd2.afterpulse_prob = 0;
            GateModel m = make_gate_model(cfg);
            m.mu = mu;
            GatingProtocol prot = cfg.protocol;
            prot.gates_total = 20000000000ULL;
            auto r = run_counting(m, prot, derive_seed(1010, idx++));
            auto o = enumerate(m);
            auto e = expected_counts(make_rate_point(m, prot, 1.0, 1.0));
            double G = static_cast<double>(prot.gates_total);
            struct Cmp {
                double mc, ref;
            };
            std::vector<Cmp> cmp{{double(r.s1_raw), o.s1 * G},
                                 {double(r.coinc_raw), o.both * G},
                                 {double(r.accidental), o.s1 * o.s2 * G},
                                 {double(r.s1_raw), e.singles_s * G},
                                 {double(r.coinc_raw), e.coinc_raw * G},
                                 {double(r.accidental), e.accidental * G}};
            for (auto& x : cmp) {
                double z = std::abs(x.mc - x.ref) / std::sqrt(x.ref);
                worst = std::max(worst, z);
                bad += z > 3;
                ++n;
            }
        }
    return {bad == 0, fmt("%d comparisons, worst deviation %.2f standard errors", n, worst)};
}

Verdict c11()
{
    const char* b = std::getenv("PAIRSIM_BIN");
    std::string bin = b ? b : "./pairsim";
    auto root = fs::temp_directory_path() / "pairsim_acceptance_repro";
    fs::remove_all(root);
    int files = 0;
    std::string why;
    for (auto fig : figure_ids()) {
        std::string g = fig == "fig6" ? "10000000000" : "2000000000";
        auto first = root / (fig + "_first");
        auto r = sh(bin + " reproduce " + fig + " -g " + g + " -o " + first.string());
        if (r.code != 0) {
            why += fig + ": reproduce failed (" + r.out + ") ";
            continue;
        }
        auto m = (first / "manifest.yaml").string();
        auto second = root / (fig + "_second"), third = root / (fig + "_third");
        auto r2 = sh(bin + " rerun " + m + " -o " + second.string());
        auto r3 = sh(bin + " rerun " + m + " -o " + third.string() + " --serial");
        if (r2.code != 0 || r3.code != 0) {
            why += fig + ": rerun failed ";
            continue;
        }
        auto names = csvs(first);
        if (names.empty() || names != csvs(second) || names != csvs(third))
            why += fig + ": file sets differ ";
        for (auto& nm : names) {
            auto ref = slurp(first / nm);
            if (ref != slurp(second / nm) || ref != slurp(third / nm))
                why += fig + "/" + nm.string() + " differs ";
            ++files;
        }
    }
    return {why.empty() && files > 0,
            why.empty() ? fmt("%d CSV files byte-identical across reproduce, rerun and serial rerun", files) : why};
}

} // namespace

int main(int argc, char** argv)
{
    std::vector<int> only;
    for (int i = 1; i < argc; ++i)
        only.push_back(std::atoi(argv[i]));
    std::vector<std::pair<int, std::function<Verdict()>>> all{{1, c1}, {2, c2}, {3, c3}, {4, c4},
                                                              {5, c5}, {6, c6}, {7, c7}, {8, c8},
                                                              {9, c9}, {10, c10}, {11, c11}};
    int failed = 0, ran = 0;
    for (auto& [id, fn] : all) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end())
            continue;
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d: %s [%.1f s]\n", v.ok ? "PASS" : "FAIL", id, v.detail.c_str(), dt);
        std::fflush(stdout);
        failed += !v.ok;
        ++ran;
    }
    std::printf("%d of %d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
