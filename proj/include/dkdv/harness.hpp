#pragma once

#include <filesystem>
#include <string>

#include "dkdv/bilinear.hpp"
#include "dkdv/bourgain.hpp"
#include "dkdv/evolution.hpp"

namespace dkdv {

struct InitialCondition {
    std::string kind = "bump";  // bump | random-hs | zero
    double amplitude = 1.0;
};

struct ExperimentConfig {
    ModelParams model;

    // grid
    std::int64_t n_points = 512;
    double domain_length = 64.0 * M_PI;
    std::int64_t n_time = 512;
    double t_box = 4.0;

    // run
    double dt = 1e-3;
    double run_T = 1.0;
    std::int64_t record_every = 10;
    double s_probe = 0.0;
    InitialCondition ic;

    PicardConfig picard;

    // sweep
    std::vector<double> sweep_s = {-0.9};
    std::vector<double> sweep_alpha = {1.0};
    std::vector<double> n1_list = {16, 32, 64, 128, 256};

    // verify
    int trials = 10;
    LemmaCheckOptions lemma_opts;

    // io
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int jobs = 1;
    bool resume = false;
    bool svg_timestamp = false;

    void validate() const;
};

// Parses and fully validates a JSON config; unknown keys and constraint
// violations are reported with their key paths.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text);

std::string config_defaults_help();

// Dispatch; returns the process exit status (0 ok, 2 validation, 3 numerical).
int run_subcommand(const std::string& name, const ExperimentConfig& cfg);

// write-then-rename; never leaves a partial file at `path`
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string sweep_report_json(const SweepReport& rep);
std::string sweep_report_csv(const SweepReport& rep);

// SVG line charts (log-log for sweeps, semilog-y for decay series); data
// embedded as a CSV comment. Values are floored at 1e-300 before taking logs.
std::string sweep_plot_svg(const SweepReport& rep, bool timestamp);
std::string decay_plot_svg(const std::vector<double>& times, const std::vector<double>& values,
                           bool timestamp);

void emit_plot(const SweepReport& rep, const std::filesystem::path& path, bool timestamp = false);
void emit_plot(const std::vector<double>& times, const std::vector<double>& values,
               const std::filesystem::path& path, bool timestamp = false);

}  // namespace dkdv
