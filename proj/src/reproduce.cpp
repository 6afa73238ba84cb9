#include "pairsim/reproduce.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pairsim/canonical.hpp"
#include "pairsim/config.hpp"
#include "pairsim/csv.hpp"
#include "pairsim/rng.hpp"

namespace fs = std::filesystem;

namespace pairsim {

std::vector<std::string> figure_ids() { return {"fig3", "fig4", "fig5", "fig6", "fig7"}; }

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty())
            continue;
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size())
                throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("value list: cannot parse '" + tok + "'");
        }
    }
    if (v.empty())
        throw ConfigError("value list: empty");
    return v;
}

namespace {

const std::vector<double> kLengthsUm = {96, 196, 396};

SimConfig reseed(SimConfig c, std::uint64_t tag)
{
    c.seed = derive_seed(c.seed, tag);
    return c;
}

void require_defined(const SweepResult& s, const char* what)
{
    for (auto& p : s.points)
        if (!p.rec.car_defined)
            throw DegenerateError(std::string(what) + ": no accidentals at " + to_string(s.axis) +
                                  " = " + format_number(p.x) + "; increase gates_total");
}

std::vector<std::pair<double, double>> net_series(const SweepResult& s)
{
    std::vector<std::pair<double, double>> v;
    for (auto& p : s.points)
        v.emplace_back(p.x, p.m.coinc_net);
    return v;
}

std::vector<double> fig3_powers() { return linear_grid(0.05, 1.0, 0.05); }
std::vector<double> fig6_powers() { return linear_grid(0.03, 0.45, 0.02); }
std::vector<double> fig7_powers()
{
    return {0.05, 0.09, 0.13, 0.17, 0.22, 0.26, 0.34, 0.43, 0.52, 0.65, 0.8, 1.0, 1.2};
}

CsvTable fig4a_table(const SimConfig& base, Exec ex)
{
    SimConfig c = reseed(for_length(base, 96), 41);
    c.pump.peak_power_w = 0.17;
    auto s = detuning_sweep(c, linear_grid(0.0, 0.7e12, 0.05e12), ex);
    require_defined(s, "fig4a");
    CsvTable t({"detuning_thz", "car", "car_err"});
    for (auto& p : s.points)
        t.row().add(p.x * 1e-12).add(p.m.car).add(p.m.car_err);
    return t;
}

CsvTable fig4b_table(const SimConfig& base, Exec ex)
{
    CsvTable t({"power_w", "detuning_thz", "coinc_net"});
    std::uint64_t tag = 420;
    for (double d : {0.4e12, 0.5e12, 0.6e12, 0.7e12}) {
        SimConfig c = reseed(with_detuning(for_length(base, 96), d), tag++);
        auto s = power_sweep(c, linear_grid(0.05, 0.5, 0.05), ex);
        for (auto& p : s.points)
            t.row().add(p.x).add(d * 1e-12).add(p.m.coinc_net);
    }
    return t;
}

CsvTable fig5a_table(const SimConfig& base, Exec ex)
{
    CsvTable t({"power_w", "length_um", "coinc_net", "coinc_net_fit"});
    std::uint64_t tag = 510;
    for (double L : kLengthsUm) {
        SimConfig c = reseed(for_length(base, L), tag++);
        auto s = power_sweep(c, fig3_powers(), ex);
        auto fit = fit_quadratic(net_series(s));
        for (auto& p : s.points)
            t.row().add(p.x).add(L).add(p.m.coinc_net).add(fit.eval(p.x));
    }
    return t;
}

CsvTable fig5b_table(const SimConfig& base, Exec ex)
{
    CsvTable t({"detuning_thz", "length_um", "coinc_net"});
    std::uint64_t tag = 520;
    for (double L : kLengthsUm) {
        SimConfig c = reseed(for_length(base, L), tag++);
        auto s = detuning_sweep(c, linear_grid(0.3e12, 0.7e12, 0.05e12), ex);
        for (auto& p : s.points)
            t.row().add(p.x * 1e-12).add(L).add(p.m.coinc_net);
    }
    return t;
}

CsvTable fig7_table(const SimConfig& base, Exec ex)
{
    CsvTable t({"power_w", "length_um", "detuning_thz", "mu_ratio"});
    std::uint64_t tag = 710;
    for (auto [L, d] : {std::pair{96.0, 0.5e12}, std::pair{196.0, 0.5e12}, std::pair{196.0, 0.7e12}}) {
        SimConfig c = reseed(with_detuning(for_length(base, L), d), tag++);
        auto s = mu_ratio_experiment(c, fig7_powers(), ex);
        for (auto& p : s.points)
            t.row().add(p.x).add(L).add(d * 1e-12).add(p.m.mu_ratio);
    }
    return t;
}

} // namespace

CsvTable fig3_table(const SimConfig& base, Exec ex)
{
    CsvTable t({"power_w", "car", "car_err", "coinc_net", "coinc_net_fit", "leak_mode"});
    SimConfig aligned = reseed(for_length(base, 96), 31);
    SimConfig offset = reseed(for_length(base, 96), 32);
    offset.signal_ch.fbg_suppression_db = 0.0;
    offset.idler_ch.fbg_suppression_db = 0.0;
    for (auto [c, mode] : {std::pair{aligned, "fbg-aligned"}, std::pair{offset, "fbg-offset"}}) {
        auto s = power_sweep(c, fig3_powers(), ex);
        require_defined(s, "fig3");
        auto fit = fit_quadratic(net_series(s));
        for (auto& p : s.points)
            t.row().add(p.x).add(p.m.car).add(p.m.car_err).add(p.m.coinc_net).add(fit.eval(p.x)).add(
                std::string(mode));
    }
    return t;
}

CsvTable fig6_table(const SimConfig& base, Exec ex, CsvTable* per_power)
{
    CsvTable t({"length_um", "car_max", "car_err", "p_opt_w"});
    std::uint64_t tag = 610;
    for (double L : kLengthsUm) {
        auto m = find_max_car(reseed(for_length(base, L), tag++), fig6_powers(), ex);
        t.row().add(L).add(m.car_max).add(m.record.car_err).add(m.p_opt);
    }
    if (per_power) {
        *per_power = CsvTable({"length_um", "power_w", "car", "car_err"});
        for (double L : kLengthsUm) {
            auto curve = estimate_car_curve(reseed(for_length(base, L), tag++), {0.17, 0.34}, ex);
            for (auto& [P, r] : curve) {
                if (!r.car_defined)
                    throw DegenerateError("fig6a: no accidentals; increase gates_total");
                per_power->row().add(L).add(P).add(r.car).add(r.car_err);
            }
        }
    }
    return t;
}

namespace {

std::vector<std::string> run_reproduce(const Job& job, const std::string& fig)
{
    std::vector<std::pair<std::string, CsvTable>> out;
    const auto& c = job.config;
    if (fig == "fig3") {
        out.emplace_back("fig3.csv", fig3_table(c, job.exec));
    } else if (fig == "fig4") {
        out.emplace_back("fig4a.csv", fig4a_table(c, job.exec));
        out.emplace_back("fig4b.csv", fig4b_table(c, job.exec));
    } else if (fig == "fig5") {
        out.emplace_back("fig5a.csv", fig5a_table(c, job.exec));
        out.emplace_back("fig5b.csv", fig5b_table(c, job.exec));
    } else if (fig == "fig6") {
        CsvTable a({});
        auto b = fig6_table(c, job.exec, &a);
        out.emplace_back("fig6.csv", b);
        out.emplace_back("fig6a.csv", a);
    } else if (fig == "fig7") {
        out.emplace_back("fig7.csv", fig7_table(c, job.exec));
    } else {
        throw ConfigError("reproduce: unknown figure id '" + fig + "' (fig3..fig7)");
    }
    std::vector<std::string> files;
    for (auto& [name, t] : out) {
        auto p = (fs::path(job.out_dir) / name).string();
        t.write(p);
        files.push_back(p);
    }
    return files;
}

std::vector<std::string> run_sweep(const Job& job)
{
    if (job.args.size() < 2)
        throw ConfigError("sweep: expected axis and value list");
    const auto& axis = job.args[0];
    auto vals = parse_list(job.args[1]);
    SweepResult s;
    std::string col;
    double scale = 1;
    if (axis == "power") {
        s = power_sweep(job.config, vals, job.exec);
        col = "power_w";
    } else if (axis == "detuning") {
        for (auto& v : vals)
            v *= 1e12;
        s = detuning_sweep(job.config, vals, job.exec);
        col = "detuning_thz";
        scale = 1e-12;
    } else if (axis == "length") {
        std::vector<SimConfig> cfgs;
        for (double L : vals) {
            SimConfig c = for_length(job.config, L);
            c.pump.peak_power_w = job.config.pump.peak_power_w;
            cfgs.push_back(c);
        }
        s = length_sweep(cfgs, job.exec);
        col = "length_um";
        scale = 1e6;
    } else {
        throw ConfigError("sweep: unknown axis '" + axis + "' (power, detuning, length)");
    }
    CsvTable t({col, "car", "car_err", "coinc_raw", "accidental", "coinc_net", "s1_raw", "mu1", "mu2",
                "mu_ratio"});
    for (auto& p : s.points)
        t.row()
            .add(p.x * scale)
            .add(p.m.car)
            .add(p.m.car_err)
            .add(p.rec.coinc_raw)
            .add(p.rec.accidental)
            .add(p.m.coinc_net)
            .add(p.rec.s1_raw)
            .add(p.m.mu1)
            .add(p.m.mu2)
            .add(p.m.mu_ratio);
    auto path = (fs::path(job.out_dir) / ("sweep_" + axis + ".csv")).string();
    t.write(path);
    return {path};
}

} // namespace

std::string manifest_yaml(const Job& job)
{
    YAML::Emitter e;
    e << YAML::BeginMap;
    e << YAML::Key << "tool_version" << YAML::Value << kToolVersion;
    e << YAML::Key << "command" << YAML::Value << job.command;
    e << YAML::Key << "args" << YAML::Value << YAML::Flow << job.args;
    e << YAML::Key << "config_path" << YAML::Value << job.config_path;
    e << YAML::Key << "output_dir" << YAML::Value << job.out_dir;
    e << YAML::Key << "seed" << YAML::Value << format_number(job.config.seed);
    e << YAML::Key << "config_hash" << YAML::Value << hash_hex(config_hash(job.config));
    e << YAML::Key << "config" << YAML::Value;
    emit_config(e, job.config);
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

Job read_manifest(const std::string& path)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw IoError("cannot read manifest " + path);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ": parse error: " + e.msg);
    }
    if (!root.IsMap() || !root["command"] || !root["config"])
        throw ConfigError(path + ": not a run manifest (needs command and config)");
    Job j;
    try {
        j.command = root["command"].as<std::string>();
        if (root["args"])
            j.args = root["args"].as<std::vector<std::string>>();
        if (root["config_path"])
            j.config_path = root["config_path"].as<std::string>();
        if (root["output_dir"])
            j.out_dir = root["output_dir"].as<std::string>();
    } catch (const YAML::Exception& e) {
        throw ConfigError(path + ": malformed manifest: " + e.what());
    }
    j.config = parse_config_text(YAML::Dump(root["config"]), path + "#config");
    return j;
}

std::vector<std::string> execute(const Job& job)
{
    std::error_code ec;
    fs::create_directories(job.out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + job.out_dir + ": " + ec.message());
    validate(job.config, false);
    std::vector<std::string> files;
    if (job.command == "reproduce") {
        if (job.args.empty())
            throw ConfigError("reproduce: missing figure id");
        files = run_reproduce(job, job.args[0]);
    } else if (job.command == "sweep") {
        files = run_sweep(job);
    } else {
        throw ConfigError("manifest: unsupported command '" + job.command + "'");
    }
    auto mpath = (fs::path(job.out_dir) / "manifest.yaml").string();
    write_text(mpath, manifest_yaml(job));
    files.push_back(mpath);
    return files;
}

} // namespace pairsim
