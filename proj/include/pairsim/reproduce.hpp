#pragma once

#include <string>
#include <vector>

#include "pairsim/csv.hpp"
#include "pairsim/experiments.hpp"

namespace pairsim {

inline constexpr const char* kToolVersion = "1.0.0";

// one batch run: "reproduce" {figN} or "sweep" {axis, values}
struct Job {
    std::string command;
    std::vector<std::string> args;
    std::string config_path; // informational
    SimConfig config;
    std::string out_dir = ".";
    Exec exec = Exec::parallel;
};

std::vector<std::string> figure_ids();

// writes the CSV tables and manifest.yaml into job.out_dir, returns the files written
std::vector<std::string> execute(const Job& job);

std::string manifest_yaml(const Job& job);
Job read_manifest(const std::string& path);

// individual tables, exposed for tests
CsvTable fig3_table(const SimConfig& base, Exec ex);
CsvTable fig6_table(const SimConfig& base, Exec ex, CsvTable* per_power = nullptr);

std::vector<double> parse_list(const std::string& s); // "0.1,0.2" -> {0.1, 0.2}

} // namespace pairsim
