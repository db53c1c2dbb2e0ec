// Command-line front end: spectra, population dynamics, dipole correlators,
// parameter sweeps, Lorentzian fitting, and the self-check suite, all emitting
// plain CSV for external plotting.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "sqspec/bloch_correlation.hpp"
#include "sqspec/csv.hpp"
#include "sqspec/master_equation.hpp"
#include "sqspec/spectrum.hpp"
#include "sqspec/validation.hpp"

namespace {

using namespace sqspec;

/// `key = value` lines; blank lines and #-comments are skipped.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::InvalidFlag, "cannot read config file '" + path + "'");
    }
    const auto trim = [](std::string text) {
        const auto begin = text.find_first_not_of(" \t");
        const auto end = text.find_last_not_of(" \t\r");
        if (begin == std::string::npos) return std::string();
        return text.substr(begin, end - begin + 1);
    };
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t equals = stripped.find('=');
        if (equals == std::string::npos) {
            throw Error(ErrorCode::InvalidFlag, "config line lacks '=': " + stripped);
        }
        const std::string key = trim(stripped.substr(0, equals));
        const std::string value = trim(stripped.substr(equals + 1));
        if (key.empty()) {
            throw Error(ErrorCode::InvalidFlag, "config line lacks a key: " + stripped);
        }
        if (key == "config") {
            throw Error(ErrorCode::InvalidFlag, "config files cannot chain to other config files");
        }
        entries.emplace_back(key, value);
    }
    return entries;
}

/// Splice config-file entries into the argument list as ordinary long flags,
/// skipping any key also given on the command line so that flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    bool found = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                throw Error(ErrorCode::InvalidFlag, "--config requires a file path");
            }
            path = args[i + 1];
            found = true;
            ++i;
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            found = true;
        }
    }
    if (!found) return args;

    std::vector<std::string> out;
    std::size_t splice_at = 0;
    if (!args.empty() && args.front().rfind('-', 0) != 0) {
        out.push_back(args.front());  // keep the subcommand name first
        splice_at = 1;
    }
    for (const auto& [key, value] : parse_config_file(path)) {
        const std::string flag = "--" + key;
        bool overridden = false;
        for (const auto& arg : args) {
            if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
                overridden = true;
                break;
            }
        }
        if (!overridden) {
            out.push_back(flag);
            out.push_back(value);
        }
    }
    out.insert(out.end(), args.begin() + splice_at, args.end());
    return out;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::FitDiverged:
        case ErrorCode::DegenerateSeries:
            return 4;
        case ErrorCode::SingularSystem:
            return 3;
        default:
            return 2;
    }
}

std::string short_number(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::UnwritableOutput, "cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw Error(ErrorCode::UnwritableOutput, "short write to '" + path + "'");
    }
}

/// Peak summary that stays printable for all-zero or grid-wide lines.
std::string peak_summary(const SpectrumSeries& series) {
    try {
        const PeakInfo peak = peak_and_hwhm(series);
        return "peak_delta=" + short_number(peak.peak_delta) +
               " height=" + short_number(peak.height) + " hwhm=" + short_number(peak.hwhm);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoHalfCrossing) throw;
        const std::size_t peak = peak_index(series);
        return "peak_delta=" + short_number(series.grid.value(peak)) +
               " height=" + short_number(series.values[peak]) + " hwhm=n/a";
    }
}

constexpr double kUnsetBound = std::numeric_limits<double>::quiet_NaN();

struct SpectrumFlags {
    double gamma = 1.0;
    double big_n = 0.0;
    double big_m = 0.0;
    std::string mode = "consistent";
    double delta_min = kUnsetBound;
    double delta_max = kUnsetBound;
    std::size_t points = 2001;
    double tau_max = 0.0;  // 0 means "auto horizon"
    std::size_t tau_steps = 16000;
    std::string out = "spectrum.csv";
};

DetuningGrid make_grid(const SpectrumFlags& flags) {
    const double lo = std::isnan(flags.delta_min) ? -20.0 * flags.gamma : flags.delta_min;
    const double hi = std::isnan(flags.delta_max) ? 20.0 * flags.gamma : flags.delta_max;
    return DetuningGrid(lo, hi, flags.points);
}

SpectrumSeries compute_spectrum(const SpectrumFlags& flags) {
    const ReservoirParams params = validate_params(flags.gamma, flags.big_n, flags.big_m);
    const SpectrumMode mode = parse_spectrum_mode(flags.mode);
    const SpectrumSeries series =
        spectrum_series(params, mode, make_grid(flags), flags.tau_max, flags.tau_steps);
    if (series.truncation_warning) {
        std::cerr << "warning: correlator tail exceeded 1e-10 of its initial value at tau_max;"
                     " spectrum is slightly truncated\n";
    }
    return series;
}

std::string spectrum_csv(const SpectrumSeries& series) {
    std::string csv = csv_row({"delta", "power"});
    for (std::size_t i = 0; i < series.grid.size(); ++i) {
        csv += csv_row({format_value(series.grid.value(i)), format_value(series.values[i])});
    }
    return csv;
}

int run_spectrum(const SpectrumFlags& flags) {
    const SpectrumSeries series = compute_spectrum(flags);
    write_text_file(flags.out, spectrum_csv(series));
    std::cout << peak_summary(series) << "\n";
    return 0;
}

struct DynamicsFlags {
    double gamma = 1.0;
    double big_n = 0.0;
    double big_m = 0.0;
    double initial_upper = 0.0;
    double t_max = 2.0;
    std::size_t steps = 200;
    std::string out = "dynamics.csv";
};

int run_dynamics(const DynamicsFlags& flags) {
    if (!(flags.initial_upper >= 0.0 && flags.initial_upper <= 1.0)) {
        throw Error(ErrorCode::InvalidFlag, "--rho-a0 must lie in [0, 1]");
    }
    if (!(flags.t_max > 0.0)) {
        throw Error(ErrorCode::InvalidFlag, "--t-max must be positive");
    }
    if (flags.steps < 1) {
        throw Error(ErrorCode::InvalidFlag, "--steps must be at least 1");
    }
    const ReservoirParams params = validate_params(flags.gamma, flags.big_n, flags.big_m);
    const Liouvillian gen = build_liouvillian(params);
    const DensityMatrix rho0 = DensityMatrix::diagonal(flags.initial_upper);

    std::string csv = csv_row({"t", "rho_a_closed", "rho_a_evolved"});
    double worst = 0.0;
    for (std::size_t k = 0; k <= flags.steps; ++k) {
        const double t = flags.t_max * double(k) / double(flags.steps);
        const double closed = upper_population(params, flags.initial_upper, t);
        const double evolved = evolve(gen, rho0, t).upper_population();
        worst = std::max(worst, std::abs(closed - evolved));
        csv += csv_row({format_value(t), format_value(closed), format_value(evolved)});
    }
    write_text_file(flags.out, csv);
    if (worst > 1e-8) {
        std::cerr << "error: closed-form and propagated populations disagree by " << worst
                  << "\n";
        return 3;
    }
    std::cout << "rows=" << (flags.steps + 1) << " max_column_gap=" << short_number(worst)
              << "\n";
    return 0;
}

struct CorrelateFlags {
    double gamma = 1.0;
    double big_n = 0.0;
    double big_m = 0.0;
    double tau_max = 0.0;  // 0 means "auto horizon"
    std::size_t steps = 200;
    std::string mode = "all";
    std::string out = "correlate.csv";
};

int run_correlate(const CorrelateFlags& flags) {
    if (flags.steps < 1) {
        throw Error(ErrorCode::InvalidFlag, "--steps must be at least 1");
    }
    const bool want_paper = flags.mode == "all" || flags.mode == "paper";
    const bool want_exact = flags.mode == "all" || flags.mode == "exact";
    const bool want_numeric = flags.mode == "all" || flags.mode == "numeric";
    if (!want_paper && !want_exact && !want_numeric) {
        throw Error(ErrorCode::InvalidFlag, "--mode must be all, paper, exact, or numeric");
    }
    const ReservoirParams params = validate_params(flags.gamma, flags.big_n, flags.big_m);
    const double tau_max = flags.tau_max > 0.0 ? flags.tau_max : default_tau_max(params);

    std::vector<std::string> header{"tau"};
    if (want_paper) header.push_back("c_paper");
    if (want_exact) header.push_back("c_exact");
    if (want_numeric) header.push_back("c_numeric_re");
    std::string csv = csv_row(header);
    for (std::size_t k = 0; k <= flags.steps; ++k) {
        const double tau = tau_max * double(k) / double(flags.steps);
        std::vector<std::string> cells{format_value(tau)};
        if (want_paper) cells.push_back(format_value(correlator_paper(params, tau)));
        if (want_exact) cells.push_back(format_value(correlator_exact(params, tau)));
        if (want_numeric)
            cells.push_back(format_value(correlator_numeric(params, tau).real()));
        csv += csv_row(cells);
    }
    write_text_file(flags.out, csv);
    std::cout << "rows=" << (flags.steps + 1) << " tau_max=" << short_number(tau_max) << "\n";
    return 0;
}

struct SweepFlags {
    double gamma = 1.0;
    std::string n_list;
    std::string m_rule = "zero";
    std::string mode = "consistent";
    double delta_min = kUnsetBound;
    double delta_max = kUnsetBound;
    std::size_t points = 2001;
    double tau_max = 0.0;
    std::size_t tau_steps = 16000;
    std::string out = "sweep_out";
};

std::vector<double> parse_n_list(const std::string& text) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string cell = text.substr(start, comma - start);
        if (cell.empty()) {
            throw Error(ErrorCode::InvalidFlag, "--n-list has an empty entry");
        }
        try {
            std::size_t used = 0;
            const double value = std::stod(cell, &used);
            if (used != cell.size()) throw std::invalid_argument(cell);
            values.push_back(value);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidFlag, "--n-list entry '" + cell + "' is not a number");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (values.empty()) {
        throw Error(ErrorCode::InvalidFlag, "--n-list must not be empty");
    }
    return values;
}

int run_sweep(const SweepFlags& flags) {
    if (flags.m_rule != "zero" && flags.m_rule != "maximal") {
        throw Error(ErrorCode::InvalidFlag, "--m-rule must be zero or maximal");
    }
    std::vector<double> n_values = parse_n_list(flags.n_list);
    std::sort(n_values.begin(), n_values.end());

    std::error_code fs_error;
    std::filesystem::create_directories(flags.out, fs_error);
    if (fs_error) {
        throw Error(ErrorCode::UnwritableOutput,
                    "cannot create output directory '" + flags.out + "'");
    }

    for (const double big_n : n_values) {
        SpectrumFlags one;
        one.gamma = flags.gamma;
        one.big_n = big_n;
        one.big_m =
            flags.m_rule == "maximal" ? std::sqrt(big_n * (big_n + 1.0)) : 0.0;
        one.mode = flags.mode;
        one.delta_min = flags.delta_min;
        one.delta_max = flags.delta_max;
        one.points = flags.points;
        one.tau_max = flags.tau_max;
        one.tau_steps = flags.tau_steps;
        const SpectrumSeries series = compute_spectrum(one);
        const std::string path =
            flags.out + "/spectrum_N" + short_number(big_n) + ".csv";
        write_text_file(path, spectrum_csv(series));
        std::cout << "N=" << short_number(big_n) << " " << peak_summary(series) << "\n";
    }
    return 0;
}

struct FitFlags {
    std::string in;
};

int run_fit(const FitFlags& flags) {
    const CsvTable table = parse_csv_file(flags.in);
    if (table.header.size() != 2) {
        throw Error(ErrorCode::MalformedCsv, "expected two columns (delta,power)");
    }
    if (table.rows.size() < 7) {
        throw Error(ErrorCode::MalformedCsv, "need at least 7 data points");
    }
    const double lo = table.rows.front()[0];
    const double hi = table.rows.back()[0];
    const DetuningGrid grid = [&] {
        try {
            return DetuningGrid(lo, hi, table.rows.size());
        } catch (const Error&) {
            throw Error(ErrorCode::MalformedCsv,
                        "detuning column does not form a valid zero-straddling grid");
        }
    }();
    std::vector<double> values(table.rows.size());
    const double slack = 1e-9 * grid.spacing();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (std::abs(table.rows[i][0] - grid.value(i)) > slack) {
            throw Error(ErrorCode::MalformedCsv, "detuning column is not a uniform grid");
        }
        values[i] = table.rows[i][1];
    }
    const LorentzianFit fit = lorentzian_fit(SpectrumSeries{grid, std::move(values), false});
    std::cout << "amplitude = " << format_value(fit.amplitude) << "\n"
              << "center = " << format_value(fit.center) << "\n"
              << "half_width = " << format_value(fit.half_width) << "\n"
              << "residual_norm = " << format_value(fit.residual_norm) << "\n";
    return 0;
}

int run_validate(const std::string& out) {
    const ValidationReport report = run_validation_suite();
    const std::string csv = report_to_csv(report);
    std::cout << csv;
    std::size_t passed = 0;
    for (const auto& check : report.checks) {
        if (check.passed) ++passed;
    }
    std::cout << "summary: " << passed << "/" << report.checks.size() << " checks passed\n";
    if (!report.all_passed()) {
        for (const auto& check : report.checks) {
            if (!check.passed) std::cout << "FAILED: " << check.name << "\n";
        }
    }
    if (!out.empty()) {
        write_text_file(out, csv);
    }
    return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-level atom in a squeezed or thermal reservoir:"
                 " dynamics, dipole correlators, and fluorescence spectra",
                 "sqspec"};
    app.require_subcommand(1);

    std::string config_path;
    const auto add_config_flag = [&config_path](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "file of key = value defaults; explicit flags override it");
    };

    SpectrumFlags spectrum_flags;
    auto* spectrum_cmd =
        app.add_subcommand("spectrum", "sample one spectrum mode over a detuning grid");
    spectrum_cmd->add_option("--gamma", spectrum_flags.gamma, "atomic decay rate");
    spectrum_cmd->add_option("--N", spectrum_flags.big_n, "reservoir mean photon number")
        ->required();
    spectrum_cmd->add_option("--M", spectrum_flags.big_m, "squeezing correlation magnitude");
    spectrum_cmd->add_option("--mode", spectrum_flags.mode,
                             "paper | consistent | exact | numeric");
    spectrum_cmd->add_option("--delta-min", spectrum_flags.delta_min,
                             "grid start (default -20*gamma)");
    spectrum_cmd->add_option("--delta-max", spectrum_flags.delta_max,
                             "grid end (default +20*gamma)");
    spectrum_cmd->add_option("--points", spectrum_flags.points, "odd grid point count");
    spectrum_cmd->add_option("--tau-max", spectrum_flags.tau_max,
                             "quadrature horizon (numeric mode; 0 = auto)");
    spectrum_cmd->add_option("--tau-steps", spectrum_flags.tau_steps,
                             "even quadrature subinterval count (numeric mode)");
    spectrum_cmd->add_option("--out", spectrum_flags.out, "output CSV path");
    add_config_flag(spectrum_cmd);

    DynamicsFlags dynamics_flags;
    auto* dynamics_cmd = app.add_subcommand(
        "dynamics", "upper-level population: closed form next to propagated");
    dynamics_cmd->add_option("--gamma", dynamics_flags.gamma, "atomic decay rate");
    dynamics_cmd->add_option("--N", dynamics_flags.big_n, "reservoir mean photon number")
        ->required();
    dynamics_cmd->add_option("--M", dynamics_flags.big_m, "squeezing correlation magnitude");
    dynamics_cmd->add_option("--rho-a0", dynamics_flags.initial_upper,
                             "initial upper-level population");
    dynamics_cmd->add_option("--t-max", dynamics_flags.t_max, "final time");
    dynamics_cmd->add_option("--steps", dynamics_flags.steps, "number of time intervals");
    dynamics_cmd->add_option("--out", dynamics_flags.out, "output CSV path");
    add_config_flag(dynamics_cmd);

    CorrelateFlags correlate_flags;
    auto* correlate_cmd =
        app.add_subcommand("correlate", "steady-state dipole correlator versus delay");
    correlate_cmd->add_option("--gamma", correlate_flags.gamma, "atomic decay rate");
    correlate_cmd->add_option("--N", correlate_flags.big_n, "reservoir mean photon number")
        ->required();
    correlate_cmd->add_option("--M", correlate_flags.big_m, "squeezing correlation magnitude");
    correlate_cmd->add_option("--tau-max", correlate_flags.tau_max, "final delay (0 = auto)");
    correlate_cmd->add_option("--steps", correlate_flags.steps, "number of delay intervals");
    correlate_cmd->add_option("--mode", correlate_flags.mode,
                              "all | paper | exact | numeric");
    correlate_cmd->add_option("--out", correlate_flags.out, "output CSV path");
    add_config_flag(correlate_cmd);

    SweepFlags sweep_flags;
    auto* sweep_cmd =
        app.add_subcommand("sweep", "one spectrum per reservoir occupation, plus a summary");
    sweep_cmd->add_option("--gamma", sweep_flags.gamma, "atomic decay rate");
    sweep_cmd->add_option("--n-list", sweep_flags.n_list, "comma-separated photon numbers")
        ->required();
    sweep_cmd->add_option("--m-rule", sweep_flags.m_rule, "zero | maximal");
    sweep_cmd->add_option("--mode", sweep_flags.mode, "paper | consistent | exact | numeric");
    sweep_cmd->add_option("--delta-min", sweep_flags.delta_min, "grid start (default -20*gamma)");
    sweep_cmd->add_option("--delta-max", sweep_flags.delta_max, "grid end (default +20*gamma)");
    sweep_cmd->add_option("--points", sweep_flags.points, "odd grid point count");
    sweep_cmd->add_option("--tau-max", sweep_flags.tau_max,
                          "quadrature horizon (numeric mode; 0 = auto)");
    sweep_cmd->add_option("--tau-steps", sweep_flags.tau_steps,
                          "even quadrature subinterval count (numeric mode)");
    sweep_cmd->add_option("--out", sweep_flags.out, "output directory");
    add_config_flag(sweep_cmd);

    FitFlags fit_flags;
    auto* fit_cmd = app.add_subcommand("fit", "single-Lorentzian fit of a spectrum CSV");
    fit_cmd->add_option("--in", fit_flags.in, "input CSV (delta,power)")->required();
    add_config_flag(fit_cmd);

    std::string validate_out;
    auto* validate_cmd =
        app.add_subcommand("validate", "run every built-in invariant check and report");
    validate_cmd->add_option("--out", validate_out, "also write the report CSV here");
    add_config_flag(validate_cmd);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(args);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    }

    try {
        if (spectrum_cmd->parsed()) return run_spectrum(spectrum_flags);
        if (dynamics_cmd->parsed()) return run_dynamics(dynamics_flags);
        if (correlate_cmd->parsed()) return run_correlate(correlate_flags);
        if (sweep_cmd->parsed()) return run_sweep(sweep_flags);
        if (fit_cmd->parsed()) return run_fit(fit_flags);
        if (validate_cmd->parsed()) return run_validate(validate_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
