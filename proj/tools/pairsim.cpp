// pairsim: command line front end for the pair-source counting simulator

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pairsim/canonical.hpp"
#include "pairsim/config.hpp"
#include "pairsim/csv.hpp"
#include "pairsim/reproduce.hpp"

using namespace pairsim;

namespace {

SimConfig load(const std::string& path, const std::string& preset_name)
{
    SimConfig c = path.empty() ? preset(preset_name) : parse_config(path);
    if (path.empty())
        apply_seed_override(c);
    return c;
}

void print_record(const CountsRecord& r)
{
    std::printf("gates        %llu\n", static_cast<unsigned long long>(r.gates));
    std::printf("s1_raw       %llu\n", static_cast<unsigned long long>(r.s1_raw));
    std::printf("dark1        %s\n", format_number(r.dark1).c_str());
    std::printf("spd2_gates   %llu\n", static_cast<unsigned long long>(r.spd2_gates));
    std::printf("s2_raw       %llu\n", static_cast<unsigned long long>(r.s2_raw));
    std::printf("coinc_raw    %llu\n", static_cast<unsigned long long>(r.coinc_raw));
    std::printf("accidental   %llu\n", static_cast<unsigned long long>(r.accidental));
    std::printf("coinc_net    %s\n", format_number(r.coinc_net).c_str());
    std::printf("car          %s +- %s\n", format_number(r.car).c_str(), format_number(r.car_err).c_str());
}

int run(int argc, char** argv)
{
    CLI::App app{"Photon-pair counting simulator: analytic model, Monte Carlo, sweeps and figure tables"};
    app.require_subcommand(1);

    std::string cfg_path, preset_name = "paper-196um";
    auto add_cfg = [&](CLI::App* s) {
        s->add_option("-c,--config", cfg_path, "YAML config file");
        s->add_option("--preset", preset_name, "preset when no config is given");
    };
    bool serial = false;

    // analytic
    auto* an = app.add_subcommand("analytic", "closed-form expected counts and CAR");
    add_cfg(an);
    std::optional<double> mu, power;
    double eta_db = 22, dark_s = 0, dark_i = 0, leak_s = 0, leak_i = 0, pj1 = 1, pj2 = 1;
    bool thermal = false;
    an->add_option("--mu", mu, "pairs per pulse; switches to direct rate-point mode");
    an->add_option("--eta-db", eta_db, "channel loss in dB (both arms)");
    an->add_option("--dark-s", dark_s, "signal dark probability per gate");
    an->add_option("--dark-i", dark_i, "idler dark probability per gate");
    an->add_option("--leak-s", leak_s, "signal leak photons per gate");
    an->add_option("--leak-i", leak_i, "idler leak photons per gate");
    an->add_option("--pj1", pj1, "SPD1 gate overlap");
    an->add_option("--pj2", pj2, "SPD2 gate overlap");
    an->add_flag("--thermal", thermal, "thermal pair statistics");
    an->add_option("-p,--power", power, "peak power in W (config mode)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo counting run at one operating point");
    add_cfg(sim);
    std::optional<double> det_thz;
    std::optional<std::uint64_t> gates;
    std::string kernel = "event";
    sim->add_option("-p,--power", power, "peak power in W");
    sim->add_option("--detuning-thz", det_thz, "channel detuning in THz");
    sim->add_option("-g,--gates", gates, "SPD1 gates per pass");
    sim->add_option("--kernel", kernel, "event or direct")->check(CLI::IsMember({"event", "direct"}));

    // sweep
    auto* sw = app.add_subcommand("sweep", "sweep power, detuning (THz) or length (um)");
    add_cfg(sw);
    std::string axis, values, out_dir = "out";
    sw->add_option("axis", axis, "power | detuning | length")->required()->check(
        CLI::IsMember({"power", "detuning", "length"}));
    sw->add_option("--values", values, "comma separated axis values")->required();
    sw->add_option("-o,--out", out_dir, "output directory");
    sw->add_option("-g,--gates", gates, "SPD1 gates per pass");
    sw->add_flag("--serial", serial, "disable OpenMP over sweep points");

    // fit
    auto* ft = app.add_subcommand("fit", "fit a CSV column pair");
    std::string model, csv_path, xcol, ycol;
    bool weighted = false;
    ft->add_option("model", model, "quadratic | power-law")->required()->check(
        CLI::IsMember({"quadratic", "power-law"}));
    ft->add_option("csv", csv_path, "input CSV")->required();
    ft->add_option("--x", xcol, "x column")->required();
    ft->add_option("--y", ycol, "y column")->required();
    ft->add_flag("--weighted", weighted, "Poissonian weights (quadratic only)");

    // reproduce
    auto* rp = app.add_subcommand("reproduce", "regenerate a figure as CSV tables");
    add_cfg(rp);
    std::string fig;
    rp->add_option("figure", fig, "fig3 | fig4 | fig5 | fig6 | fig7")->required();
    rp->add_option("-o,--out", out_dir, "output directory");
    rp->add_option("-g,--gates", gates, "SPD1 gates per pass");
    rp->add_flag("--serial", serial, "disable OpenMP over sweep points");

    // rerun
    auto* rr = app.add_subcommand("rerun", "re-execute a run manifest");
    std::string manifest;
    std::optional<std::string> rr_out;
    rr->add_option("manifest", manifest, "manifest.yaml")->required();
    rr->add_option("-o,--out", rr_out, "output directory (default: the recorded one)");
    rr->add_flag("--serial", serial, "disable OpenMP over sweep points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (*an) {
        RatePoint pt;
        if (mu) {
            pt.mu = *mu;
            pt.eta_s = pt.eta_i = db_to_transmission(eta_db);
            pt.d_s = dark_s;
            pt.d_i = dark_i;
            pt.leak_s = leak_s;
            pt.leak_i = leak_i;
            pt.p_j1 = pj1;
            pt.p_j2 = pj2;
            pt.stats = thermal ? PairStatistics::thermal : PairStatistics::poisson;
        } else {
            SimConfig c = load(cfg_path, preset_name);
            if (power)
                c.pump.peak_power_w = *power;
            pt = make_rate_point(c);
        }
        auto e = expected_counts(pt);
        std::printf("mu           %s\n", format_number(pt.mu).c_str());
        if (pt.mu > 0)
            std::printf("ideal_car    %s\n", format_number(ideal_car(pt.mu)).c_str());
        std::printf("singles_s    %s\n", format_number(e.singles_s).c_str());
        std::printf("singles_i    %s\n", format_number(e.singles_i).c_str());
        std::printf("coinc_raw    %s\n", format_number(e.coinc_raw).c_str());
        std::printf("accidental   %s\n", format_number(e.accidental).c_str());
        std::printf("coinc_net    %s\n", format_number(e.coinc_net).c_str());
        if (!e.car_defined)
            throw DegenerateError("car undefined: no accidentals");
        std::printf("car          %s\n", format_number(e.car).c_str());
        return 0;
    }

    if (*sim) {
        SimConfig c = load(cfg_path, preset_name);
        if (power)
            c.pump.peak_power_w = *power;
        if (det_thz)
            c = with_detuning(c, *det_thz * 1e12);
        if (gates)
            c.protocol.gates_total = *gates;
        validate(c, true);
        auto r = run_counting(c, kernel == "event" ? Kernel::event : Kernel::direct);
        std::printf("config_hash  %s\n", hash_hex(config_hash(c)).c_str());
        print_record(r);
        if (!r.car_defined)
            throw DegenerateError("car undefined: zero accidentals, increase --gates");
        return 0;
    }

    if (*ft) {
        auto d = read_csv(csv_path);
        auto xs = d.column(xcol), ys = d.column(ycol);
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < xs.size(); ++i)
            pts.emplace_back(xs[i], ys[i]);
        auto f = model == "quadratic" ? fit_quadratic(pts, weighted) : fit_power_law(pts);
        std::printf("model        %s\n", f.model.c_str());
        if (model == "quadratic") {
            std::printf("amplitude    %s\n", format_number(f.params[0]).c_str());
            std::printf("onset        %s\n", f.has_onset ? format_number(f.onset).c_str() : "none");
        } else {
            std::printf("prefactor    %s\n", format_number(f.params[0]).c_str());
            std::printf("exponent     %s +- %s\n", format_number(f.exponent).c_str(),
                        format_number(std::sqrt(f.cov_diag[1])).c_str());
        }
        std::printf("residual     %s\n", format_number(f.residual_norm).c_str());
        return 0;
    }

    Job job;
    job.exec = serial ? Exec::serial : Exec::parallel;
    if (*rr) {
        Job m = read_manifest(manifest);
        m.exec = job.exec;
        if (rr_out)
            m.out_dir = *rr_out;
        job = m;
    } else {
        job.config = load(cfg_path, preset_name);
        job.config_path = cfg_path.empty() ? "preset:" + preset_name : cfg_path;
        job.out_dir = out_dir;
        if (gates)
            job.config.protocol.gates_total = *gates;
        if (*sw) {
            job.command = "sweep";
            job.args = {axis, values};
        } else {
            job.command = "reproduce";
            job.args = {fig};
        }
    }
    for (auto& f : execute(job))
        std::printf("wrote %s\n", f.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const DegenerateError& e) {
        std::fprintf(stderr, "statistical degeneracy: %s\n", e.what());
        return 3;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
