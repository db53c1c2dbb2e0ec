// Acceptance suite: each numbered criterion prints exactly one PASS/FAIL
// line with its runtime. The process exits nonzero when any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sqspec/bloch_correlation.hpp"
#include "sqspec/csv.hpp"
#include "sqspec/master_equation.hpp"
#include "sqspec/spectrum.hpp"
#include "sqspec/validation.hpp"

namespace fs = std::filesystem;
using namespace sqspec;

namespace {

struct Criterion {
    std::string name;
    double time_limit_s;
    std::function<bool(std::string&)> body;
};

bool nearly(double observed, double expected, double tolerance) {
    return std::abs(observed - expected) <= tolerance;
}

ReservoirParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> gamma_dist(0.3, 3.0);
    std::uniform_real_distribution<double> n_dist(0.0, 8.0);
    std::uniform_real_distribution<double> fraction(0.0, 1.0);
    const double big_n = n_dist(rng);
    return ReservoirParams(gamma_dist(rng), big_n,
                           fraction(rng) * std::sqrt(big_n * (big_n + 1.0)));
}

// Graded trapezoid quadrature of an even function over the real line; wide
// enough that 1/delta^2 tails cost well under the 0.1% budget.
template <typename F>
double integrate_even_line(const F& f) {
    const double edges[] = {0.0, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5};
    const double steps[] = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
    double total = 0.0;
    for (int seg = 0; seg < 6; ++seg) {
        const double h = steps[seg];
        const auto count =
            static_cast<std::size_t>(std::llround((edges[seg + 1] - edges[seg]) / h));
        double acc = 0.5 * (f(edges[seg]) + f(edges[seg + 1]));
        for (std::size_t k = 1; k < count; ++k) acc += f(edges[seg] + double(k) * h);
        total += acc * h;
    }
    return 2.0 * total;
}

const char* cli_binary() { return std::getenv("SQSPEC_BIN"); }

int run_command(const std::string& command) {
    const int raw = std::system(command.c_str());
    return WEXITSTATUS(raw);
}

bool check_single_peak_and_monotone(const SpectrumSeries& series, double slack,
                                    std::string& detail) {
    const PeakInfo peak = peak_and_hwhm(series);
    if (peak.peak_delta != 0.0) {
        detail = "peak off center at " + std::to_string(peak.peak_delta);
        return false;
    }
    const std::size_t center = series.grid.size() / 2;
    for (std::size_t i = center; i + 1 < series.grid.size(); ++i) {
        if (series.values[i + 1] > series.values[i] + slack) {
            detail = "not monotone to the right";
            return false;
        }
    }
    for (std::size_t i = center; i > 0; --i) {
        if (series.values[i - 1] > series.values[i] + slack) {
            detail = "not monotone to the left";
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;

    criteria.push_back({"steady state N/(2N+1) at 1e-12", 1.0, [](std::string& detail) {
        for (const double big_n : {0.0, 1.0, 5.0, 6.0, 7.0}) {
            for (const double fraction : {0.0, 1.0}) {
                const double big_m = fraction * std::sqrt(big_n * (big_n + 1.0));
                const auto rho =
                    steady_state(build_liouvillian(ReservoirParams(1.0, big_n, big_m)));
                const double target = big_n / (2.0 * big_n + 1.0);
                if (!nearly(rho.upper_population(), target, 1e-12)) {
                    detail = "N=" + std::to_string(big_n) + " M=" + std::to_string(big_m);
                    return false;
                }
            }
        }
        return true;
    }});

    criteria.push_back({"closed-form population vs propagation at 1e-8", 1.0,
                        [](std::string& detail) {
        for (const double big_n : {0.0, 5.0}) {
            const ReservoirParams params(1.0, big_n, 0.0);
            const Liouvillian gen = build_liouvillian(params);
            for (const double initial : {0.0, 0.3, 1.0}) {
                const DensityMatrix rho0 = DensityMatrix::diagonal(initial);
                for (int k = 0; k < 200; ++k) {
                    const double t = 2.0 * double(k) / 199.0;
                    const double closed = upper_population(params, initial, t);
                    const double evolved = evolve(gen, rho0, t).upper_population();
                    if (!nearly(closed, evolved, 1e-8)) {
                        detail = "N=" + std::to_string(big_n) + " t=" + std::to_string(t);
                        return false;
                    }
                }
            }
        }
        return true;
    }});

    criteria.push_back({"thermal sweep peaks and widths via the CLI", 5.0,
                        [](std::string& detail) {
        const char* binary = cli_binary();
        if (binary == nullptr) {
            detail = "SQSPEC_BIN is not set";
            return false;
        }
        const fs::path dir = fs::temp_directory_path() / "sqspec_acceptance_sweep";
        fs::remove_all(dir);
        const std::string command = std::string(binary) +
                                    " sweep --gamma 1 --n-list 5,6,7 --m-rule zero --mode paper"
                                    " --out " + dir.string() + " > " +
                                    (dir.parent_path() / "sweep_stdout.txt").string();
        fs::create_directories(dir);
        if (run_command(command) != 0) {
            detail = "sweep command failed";
            return false;
        }
        for (const double nbar : {5.0, 6.0, 7.0}) {
            char name[64];
            std::snprintf(name, sizeof(name), "spectrum_N%g.csv", nbar);
            const CsvTable table = parse_csv_file((dir / name).string());
            DetuningGrid grid(table.rows.front()[0], table.rows.back()[0], table.rows.size());
            std::vector<double> values;
            values.reserve(table.rows.size());
            for (const auto& row : table.rows) values.push_back(row[1]);
            const PeakInfo peak = peak_and_hwhm(SpectrumSeries{grid, values, false});

            // direct substitution into the thermal closed form at zero detuning
            const double expected_peak =
                (1.0 / (2.0 * nbar + 1.0)) * 2.0 * nbar / ((nbar + 0.5) * (nbar + 0.5));
            if (!nearly(peak.height, expected_peak, 1e-6)) {
                detail = "peak height off at nbar=" + std::to_string(nbar);
                return false;
            }
            if (peak.height < 1e-2 || peak.height >= 1e-1) {
                detail = "peak not of order 1e-2 at nbar=" + std::to_string(nbar);
                return false;
            }
            const double expected_width = nbar + 0.5;
            if (std::abs(peak.hwhm - expected_width) > 0.005 * expected_width) {
                detail = "hwhm off at nbar=" + std::to_string(nbar);
                return false;
            }
        }
        // the two self-consistently printed reference peaks
        const CsvTable n5 = parse_csv_file((dir / "spectrum_N5.csv").string());
        const CsvTable n7 = parse_csv_file((dir / "spectrum_N7.csv").string());
        const double peak5 = n5.rows[n5.rows.size() / 2][1];
        const double peak7 = n7.rows[n7.rows.size() / 2][1];
        if (!nearly(peak5, 0.030053, 1e-6) || !nearly(peak7, 0.016593, 1e-6)) {
            detail = "reference peak constants missed";
            return false;
        }
        return true;
    }});

    criteria.push_back({"regression oracle agreement", 10.0, [](std::string& detail) {
        std::mt19937_64 rng(0xacce5501ull);
        for (int i = 0; i < 20; ++i) {
            const ReservoirParams params = random_params(rng);
            for (int k = 0; k <= 50; ++k) {
                const double tau = 10.0 * double(k) / 50.0 / params.decay_rate();
                const Complex numeric = correlator_numeric(params, tau);
                if (std::abs(correlator_exact(params, tau) - numeric) > 1e-8) {
                    detail = "exact vs numeric gap at sample " + std::to_string(i);
                    return false;
                }
            }
        }
        for (const double big_n : {0.0, 1.0, 5.0}) {
            const ReservoirParams params(1.0, big_n, 0.0);
            for (int k = 0; k <= 50; ++k) {
                const double tau = 10.0 * double(k) / 50.0;
                const double paper = correlator_paper(params, tau);
                const double exact = correlator_exact(params, tau);
                const Complex numeric = correlator_numeric(params, tau);
                if (std::abs(paper - exact) > 1e-10 ||
                    std::abs(Complex(paper) - numeric) > 1e-10) {
                    detail = "thermal collapse violated at N=" + std::to_string(big_n);
                    return false;
                }
            }
        }
        return true;
    }});

    criteria.push_back({"quadrature matches closed forms at 1e-6", 30.0,
                        [](std::string& detail) {
        const DetuningGrid grid(-10.0, 10.0, 401);
        {
            const ReservoirParams params(1.0, 5.0, 0.0);
            const SpectrumSeries series = spectrum_numeric(
                [&](double tau) { return Complex(correlator_paper(params, tau)); }, grid, 8.0,
                16000);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (std::abs(series.values[i] - spectrum_consistent(params, grid.value(i))) >
                    1e-6) {
                    detail = "single-exponential case off at delta=" +
                             std::to_string(grid.value(i));
                    return false;
                }
            }
        }
        {
            const ReservoirParams params(1.0, 1.0, std::sqrt(2.0));
            const SpectrumSeries series = spectrum_numeric(
                [&](double tau) { return Complex(correlator_exact(params, tau)); }, grid, 400.0,
                160000);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (std::abs(series.values[i] - spectrum_exact(params, grid.value(i))) > 1e-6) {
                    detail = "regression case off at delta=" + std::to_string(grid.value(i));
                    return false;
                }
            }
        }
        return true;
    }});

    criteria.push_back({"sum rule within 0.1%", 10.0, [](std::string& detail) {
        const std::pair<double, double> cases[] = {
            {5.0, 0.0}, {1.0, std::sqrt(2.0)}, {5.0, std::sqrt(30.0)}};
        for (const auto& [big_n, big_m] : cases) {
            const ReservoirParams params(1.0, big_n, big_m);
            const double expected = 2.0 * std::acos(-1.0) * params.steady_upper_population();
            const double consistent =
                integrate_even_line([&](double d) { return spectrum_consistent(params, d); });
            const double exact =
                integrate_even_line([&](double d) { return spectrum_exact(params, d); });
            if (std::abs(consistent - expected) > 1e-3 * expected ||
                std::abs(exact - expected) > 1e-3 * expected) {
                detail = "weight off at N=" + std::to_string(big_n);
                return false;
            }
        }
        return true;
    }});

    criteria.push_back({"single centered peak, monotone in |delta|", 30.0,
                        [](std::string& detail) {
        const DetuningGrid grid(-20.0, 20.0, 2001);
        const std::pair<double, double> cases[] = {
            {5.0, 0.0}, {6.0, 0.0}, {7.0, 0.0}, {1.0, std::sqrt(2.0)}, {5.0, std::sqrt(30.0)}};
        for (const auto& [big_n, big_m] : cases) {
            const ReservoirParams params(1.0, big_n, big_m);
            for (const SpectrumMode mode :
                 {SpectrumMode::paper, SpectrumMode::consistent, SpectrumMode::exact}) {
                const SpectrumSeries series = spectrum_series(params, mode, grid);
                if (!check_single_peak_and_monotone(series, 1e-15, detail)) {
                    detail += " (analytic)";
                    return false;
                }
            }
        }
        // quadrature mode on a lighter grid; slack covers quadrature noise
        const DetuningGrid small_grid(-10.0, 10.0, 201);
        for (const auto& [big_n, big_m] :
             {std::pair<double, double>{5.0, 0.0}, std::pair<double, double>{1.0, std::sqrt(2.0)}}) {
            const ReservoirParams params(1.0, big_n, big_m);
            const double tau_max = big_m > 0.0 ? 400.0 : 8.0;
            const std::size_t tau_steps = big_m > 0.0 ? 160000 : 16000;
            const SpectrumSeries series = spectrum_numeric(
                [&](double tau) { return correlator_numeric(params, tau); }, small_grid, tau_max,
                tau_steps);
            if (!check_single_peak_and_monotone(series, 1e-8, detail)) {
                detail += " (numeric)";
                return false;
            }
        }
        return true;
    }});

    criteria.push_back({"fit round trip and misfit detection", 5.0, [](std::string& detail) {
        const struct {
            double amplitude, center, width;
        } synthetics[] = {{0.9090909090909091, 0.0, 5.5}, {2.0, 1.3, 0.7}, {0.05, -4.0, 2.5}};
        for (const auto& s : synthetics) {
            const DetuningGrid grid(-20.0, 20.0, 2001);
            SpectrumSeries series{grid, std::vector<double>(grid.size(), 0.0), false};
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double d = grid.value(i) - s.center;
                series.values[i] = s.amplitude * s.width / (s.width * s.width + d * d);
            }
            const LorentzianFit fit = lorentzian_fit(series);
            if (std::abs(fit.amplitude - s.amplitude) > 1e-6 * s.amplitude ||
                std::abs(fit.center - s.center) > 1e-6 * std::max(1.0, std::abs(s.center)) ||
                std::abs(fit.half_width - s.width) > 1e-6 * s.width) {
                detail = "round trip missed for width " + std::to_string(s.width);
                return false;
            }
        }
        const ReservoirParams params(1.0, 1.0, std::sqrt(2.0));  // maximal M for N = 1
        const SpectrumSeries series =
            spectrum_series(params, SpectrumMode::exact, DetuningGrid(-20.0, 20.0, 2001));
        const LorentzianFit fit = lorentzian_fit(series);
        const double height = peak_and_hwhm(series).height;
        if (!(fit.residual_norm > 1e-3 * height)) {
            detail = "misfit went undetected";
            return false;
        }
        return true;
    }});

    criteria.push_back({"documented-discrepancy checks pinned in validate", 60.0,
                        [](std::string& detail) {
        const char* binary = cli_binary();
        if (binary == nullptr) {
            detail = "SQSPEC_BIN is not set";
            return false;
        }
        const fs::path report = fs::temp_directory_path() / "sqspec_acceptance_report.csv";
        const fs::path sink = fs::temp_directory_path() / "sqspec_acceptance_validate.txt";
        const std::string command = std::string(binary) + " validate --out " + report.string() +
                                    " > " + sink.string();
        if (run_command(command) != 0) {
            detail = "validate command exited nonzero";
            return false;
        }
        std::ifstream in(report);
        if (!in) {
            detail = "report CSV missing";
            return false;
        }
        bool ratio_ok = false;
        bool divergence_ok = false;
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("paper-vs-consistent-ratio,1,", 0) == 0) ratio_ok = true;
            if (line.rfind("paper-vs-oracle-divergence,1,", 0) == 0) {
                // observed divergence must exceed 0.1
                std::istringstream cells(line.substr(line.find(",1,") + 3));
                std::string observed;
                std::getline(cells, observed, ',');
                divergence_ok = std::stod(observed) > 0.1;
            }
        }
        if (!ratio_ok) detail = "ratio check missing or failed";
        if (!divergence_ok) detail += " divergence check missing or failed";
        return ratio_ok && divergence_ok;
    }});

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = criteria[i].body(detail);
        } catch (const std::exception& e) {
            detail = e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criteria[i].time_limit_s) {
            ok = false;
            detail += " (over time limit)";
        }
        std::printf("%s  %zu. %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].name.c_str(), elapsed, detail.empty() ? "" : " -- ",
                    detail.c_str());
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
