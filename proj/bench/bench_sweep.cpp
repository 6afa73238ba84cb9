// Wall-clock comparison: OpenMP sweep vs serial sweep, event kernel vs direct kernel.

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "pairsim/experiments.hpp"

using namespace pairsim;
using clk = std::chrono::steady_clock;

static double secs(clk::time_point a) { return std::chrono::duration<double>(clk::now() - a).count(); }

static SimConfig bench_config()
{
    SimConfig c;
    c.signal_ch.rolloff = {RolloffStage{"pump-wing", 0.0, 0.594e12, 2.0, 22.0}};
    c.idler_ch = c.signal_ch;
    c.idler_ch.role = ChannelRole::idler;
    c.spd2.dark_prob_per_gate = 4e-5;
    c.spd2.jitter_fwhm_s = 1.1e-9;
    return c;
}

int main(int argc, char** argv)
{
    std::uint64_t gates = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2000000000ULL;
    SimConfig c = bench_config();
    c.protocol.gates_total = gates;
    std::vector<double> powers = linear_grid(0.05, 0.6, 0.05);

    std::printf("threads %d, %zu points, %llu gates/point\n", omp_get_max_threads(), powers.size(),
                static_cast<unsigned long long>(gates));

    auto t0 = clk::now();
    auto par = estimate_car_curve(c, powers, Exec::parallel);
    double tp = secs(t0);
    t0 = clk::now();
    auto ser = estimate_car_curve(c, powers, Exec::serial);
    double ts = secs(t0);
    bool same = true;
    for (std::size_t i = 0; i < par.size(); ++i)
        same = same && par[i].second == ser[i].second;
    std::printf("sweep   openmp %.3f s   serial %.3f s   speedup %.2f   identical %s\n", tp, ts, ts / tp,
                same ? "yes" : "NO");

    // kernels on one point; the direct walk is limited to a smaller gate count
    GatingProtocol p = c.protocol;
    p.gates_total = 20000000;
    GateModel m = make_gate_model(c);
    t0 = clk::now();
    auto re = run_counting(m, p, 7, Kernel::event);
    double te = secs(t0);
    t0 = clk::now();
    auto rd = run_counting(m, p, 7, Kernel::direct);
    double td = secs(t0);
    std::printf("kernel  event %.4f s   direct %.4f s   (%llu gates)  ratio %.1f\n", te, td,
                static_cast<unsigned long long>(p.gates_total), td / te);
    std::printf("        coinc_raw event %llu direct %llu\n", static_cast<unsigned long long>(re.coinc_raw),
                static_cast<unsigned long long>(rd.coinc_raw));
    return same ? 0 : 1;
}
