#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pairsim/analytic_model.hpp"
#include "pairsim/detection_chain.hpp"
#include "pairsim/device_model.hpp"
#include "pairsim/rng.hpp"

namespace pairsim {

struct SimConfig {
    WaveguideSpec waveguide;
    PumpSpec pump;
    ChannelSpec signal_ch;
    ChannelSpec idler_ch;
    DetectorSpec spd1; // heralding detector on the signal arm
    DetectorSpec spd2; // idler arm, gated only by SPD1 clicks
    GatingProtocol protocol;
    std::uint64_t seed = 20140101;
    PairStatistics pair_statistics = PairStatistics::poisson;
};

void validate(const SimConfig& cfg, bool check_reach = true);

// everything the counting kernels need for one operating point
struct GateModel {
    double mu = 0;
    double t1 = 1, t2 = 1;   // arrival probability of a generated photon at each detector
    double pj1 = 1, pj2 = 1; // gate overlap
    double leak1 = 0, leak2 = 0;
    DetectorSpec spd1, spd2;
    PairStatistics stats = PairStatistics::poisson;

    double a1() const { return t1 * pj1; }
    double a2() const { return t2 * pj2; }
};

GateModel make_gate_model(const SimConfig& cfg);
RatePoint make_rate_point(const SimConfig& cfg);
RatePoint make_rate_point(const GateModel& m, const GatingProtocol& p, double eta_s, double eta_i);

struct CountsRecord {
    std::uint64_t gates = 0;      // SPD1 gates per pass
    std::uint64_t s1_raw = 0;     // SPD1 clicks, coincidence pass
    std::uint64_t s2_raw = 0;     // SPD2 clicks on uncorrelated gates
    std::uint64_t spd2_gates = 0; // SPD2 gates opened in the accidental pass
    double dark1 = 0, dark2 = 0;  // expected dark tallies
    std::uint64_t coinc_raw = 0;
    std::uint64_t accidental = 0;
    double coinc_net = 0;
    double car = 0;
    double car_err = 0;
    bool car_defined = false;
};

bool operator==(const CountsRecord& a, const CountsRecord& b);

void finalize(CountsRecord& r, const GateModel& m);

struct PulseOutcome {
    unsigned n_pairs = 0;
    unsigned signal_arrivals = 0;
    unsigned idler_arrivals = 0;
    std::uint64_t leak_signal = 0;
    std::uint64_t leak_idler = 0;
};

PulseOutcome simulate_pulse(const GateModel& m, Rng& rng);

// simulate_pulse with the per-model constants hoisted out of the loop
class PulseSampler {
  public:
    explicit PulseSampler(const GateModel& m);
    PulseOutcome operator()(Rng& rng) const;

  private:
    const GateModel* m_;
    PoissonSampler pairs_, leak1_, leak2_;
};

enum class Kernel { event, direct };
enum class Exec { parallel, serial };

// event kernel skips quiet gates; direct kernel walks every pulse
CountsRecord run_counting(const GateModel& m, const GatingProtocol& p, std::uint64_t seed,
                          Kernel k = Kernel::event);
CountsRecord run_counting(const SimConfig& cfg, Kernel k = Kernel::event);

// runs each config with its own seed
std::vector<CountsRecord> run_batch(const std::vector<SimConfig>& cfgs, Exec ex = Exec::parallel,
                                    Kernel k = Kernel::event);

std::vector<std::pair<double, CountsRecord>>
estimate_car_curve(const SimConfig& cfg, const std::vector<double>& powers,
                   Exec ex = Exec::parallel, Kernel k = Kernel::event);

} // namespace pairsim
