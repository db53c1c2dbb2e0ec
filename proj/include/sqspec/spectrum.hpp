#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "sqspec/bloch_correlation.hpp"
#include "sqspec/master_equation.hpp"

namespace sqspec {

/// Uniform grid of detunings delta = omega - omega0. The point count is kept
/// odd so that a symmetric grid places delta = 0 on a grid point.
class DetuningGrid {
public:
    DetuningGrid(double delta_min, double delta_max, std::size_t points)
        : delta_min_(delta_min), delta_max_(delta_max), points_(points) {
        if (!(delta_min < 0.0) || !(delta_max > 0.0)) {
            throw Error(ErrorCode::InvalidGrid, "grid must straddle zero detuning");
        }
        if (points < 3 || points % 2 == 0) {
            throw Error(ErrorCode::InvalidGrid, "grid needs an odd point count of at least 3");
        }
    }

    std::size_t size() const { return points_; }
    double spacing() const { return (delta_max_ - delta_min_) / double(points_ - 1); }
    double value(std::size_t i) const { return delta_min_ + double(i) * spacing(); }
    double min() const { return delta_min_; }
    double max() const { return delta_max_; }

private:
    double delta_min_;
    double delta_max_;
    std::size_t points_;
};

/// Sampled power spectrum over a detuning grid. `truncation_warning` is set
/// by the quadrature route when the correlator tail at tau_max was above the
/// 1e-10 relative target but still acceptable.
struct SpectrumSeries {
    DetuningGrid grid;
    std::vector<double> values;
    bool truncation_warning = false;
};

/// Analytic single-Lorentzian spectrum with unit-numerator normalization,
///   P(delta) = [1/(2N+1)] [2N / (delta^2 + gamma^2 (N - M + 1/2)^2)].
/// Vanishes identically for N = 0.
inline double spectrum_paper(const ReservoirParams& params, double delta) {
    const double big_n = params.mean_photon_number();
    if (big_n == 0.0) return 0.0;
    const double half_width = params.decay_rate() *
                              (big_n - params.squeezing_magnitude() + 0.5);
    return (1.0 / (2.0 * big_n + 1.0)) * 2.0 * big_n / (delta * delta + half_width * half_width);
}

/// Thermal-reservoir spectrum: the M = 0 case with N = nbar.
inline double spectrum_thermal(double gamma, double nbar, double delta) {
    return spectrum_paper(ReservoirParams(gamma, nbar, 0.0), delta);
}

/// Lorentzian obtained by actually integrating the single-exponential
/// correlator: 2 Re int_0^inf rho_a(inf) e^{-(a/2 - i delta) tau} dtau, i.e.
///   P(delta) = [2N/(2N+1)] (a/2) / (delta^2 + (a/2)^2).
/// Carries the extra numerator factor a/2 relative to spectrum_paper and is
/// the form that satisfies the sum rule.
inline double spectrum_consistent(const ReservoirParams& params, double delta) {
    const BlochCoefficients coeffs = bloch_coefficients(params);
    const double half_width = 0.5 * coeffs.a;
    if (half_width <= 1e-12) {
        throw Error(ErrorCode::DegenerateWidth, "sum-mode decay rate a/2 is not positive");
    }
    const double big_n = params.mean_photon_number();
    return (2.0 * big_n / (2.0 * big_n + 1.0)) * half_width /
           (delta * delta + half_width * half_width);
}

/// Two-Lorentzian spectrum of the full regression correlator: equal-weight
/// Lorentzians of half-widths Gamma-+ = gamma (N + 1/2 -+ M),
///   P(delta) = rho_a(inf) [G-/(delta^2+G-^2) + G+/(delta^2+G+^2)].
inline double spectrum_exact(const ReservoirParams& params, double delta) {
    const CoherenceRates rates = coherence_rates(params);
    if (rates.sum_mode <= 1e-12) {
        throw Error(ErrorCode::DegenerateWidth, "narrow component width is not positive");
    }
    const double stationary = params.steady_upper_population();
    return stationary * (rates.sum_mode / (delta * delta + rates.sum_mode * rates.sum_mode) +
                         rates.difference_mode /
                             (delta * delta + rates.difference_mode * rates.difference_mode));
}

/// Half-range Fourier transform of an arbitrary correlator,
///   P(delta) = 2 Re int_0^tau_max e^{i delta tau} C(tau) dtau,
/// by composite Simpson quadrature on a uniform tau grid. tau_steps is the
/// (even) number of subintervals. The correlator must have decayed at
/// tau_max: a tail above 1e-4 of C(0) is a hard error, one above 1e-10
/// only sets the truncation warning on the returned series.
inline SpectrumSeries spectrum_numeric(const std::function<Complex(double)>& correlator,
                                       const DetuningGrid& grid, double tau_max,
                                       std::size_t tau_steps) {
    if (!(tau_max > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tau_max must be positive");
    }
    if (tau_steps < 100 || tau_steps % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "tau_steps must be an even subinterval count of at least 100");
    }

    const double step = tau_max / double(tau_steps);
    std::vector<Complex> samples(tau_steps + 1);
    for (std::size_t k = 0; k <= tau_steps; ++k) {
        samples[k] = correlator(double(k) * step);
    }

    const double head = std::abs(samples.front());
    const double tail = std::abs(samples.back());
    bool truncated = false;
    if (tail > 1e-4 * head) {
        throw Error(ErrorCode::NonDecayedTail,
                    "correlator has not decayed at tau_max; increase tau_max");
    }
    if (tail > 1e-10 * head) {
        truncated = true;
    }

    // Simpson weights h/3 * (1, 4, 2, ..., 2, 4, 1), folded into the samples.
    std::vector<Complex> weighted(samples);
    for (std::size_t k = 1; k < tau_steps; ++k) {
        weighted[k] *= (k % 2 == 1) ? 4.0 : 2.0;
    }
    const double prefactor = step / 3.0;

    SpectrumSeries series{grid, std::vector<double>(grid.size(), 0.0), truncated};
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double delta = grid.value(g);
        // e^{i delta tau_k} by phase recurrence: one sincos per detuning.
        const Complex rotation(std::cos(delta * step), std::sin(delta * step));
        Complex phase(1.0, 0.0);
        Complex acc(0.0, 0.0);
        for (std::size_t k = 0; k <= tau_steps; ++k) {
            acc += weighted[k] * phase;
            phase *= rotation;
        }
        double value = 2.0 * prefactor * acc.real();
        if (value < 0.0) {
            if (value < -1e-9) {
                throw Error(ErrorCode::InvalidArgument,
                            "quadrature produced a significantly negative spectrum value");
            }
            value = 0.0;  // truncation noise
        }
        series.values[g] = value;
    }
    return series;
}

struct PeakInfo {
    double peak_delta;
    double height;
    double hwhm;
};

/// Index of the series maximum; ties go to the smallest |delta|, then to the
/// smaller delta.
inline std::size_t peak_index(const SpectrumSeries& series) {
    const auto& values = series.values;
    const auto& grid = series.grid;
    if (values.size() != grid.size() || values.empty()) {
        throw Error(ErrorCode::InvalidArgument, "series and grid sizes disagree");
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double v = values[i];
        const double best = values[peak];
        if (v > best) {
            peak = i;
        } else if (v == best) {
            const double cand = std::abs(grid.value(i));
            const double incumbent = std::abs(grid.value(peak));
            if (cand < incumbent || (cand == incumbent && grid.value(i) < grid.value(peak))) {
                peak = i;
            }
        }
    }
    return peak;
}

/// Locate the spectrum maximum via peak_index and measure the half width at
/// half maximum by linearly interpolating the half-height crossing on each
/// side and averaging.
inline PeakInfo peak_and_hwhm(const SpectrumSeries& series) {
    const auto& values = series.values;
    const auto& grid = series.grid;
    const std::size_t peak = peak_index(series);
    const double height = values[peak];
    const double half = 0.5 * height;

    const auto crossing = [&](bool rightward) -> double {
        std::size_t i = peak;
        while (true) {
            if (rightward ? (i + 1 >= values.size()) : (i == 0)) {
                throw Error(ErrorCode::NoHalfCrossing,
                            "spectrum does not fall below half height within the grid");
            }
            const std::size_t next = rightward ? i + 1 : i - 1;
            if (values[next] < half) {
                const double fraction = (values[i] - half) / (values[i] - values[next]);
                return grid.value(i) + fraction * (grid.value(next) - grid.value(i));
            }
            i = next;
        }
    };

    const double right = crossing(true);
    const double left = crossing(false);
    const double center = grid.value(peak);
    return {center, height, 0.5 * ((right - center) + (center - left))};
}

/// Single-Lorentzian least-squares fit A w / (w^2 + (delta - c)^2).
struct LorentzianFit {
    double amplitude;
    double center;
    double half_width;
    double residual_norm;  // root-mean-square residual
};

/// Fit the Lorentzian model to a series by damped Gauss-Newton
/// (Levenberg-style diagonal damping), initialized from peak_and_hwhm.
/// Converged when the relative step drops below 1e-10 or after 200
/// iterations; exhausting the damping range raises FitDiverged.
inline LorentzianFit lorentzian_fit(const SpectrumSeries& series) {
    const auto& values = series.values;
    const auto& grid = series.grid;
    if (values.size() < 7) {
        throw Error(ErrorCode::InvalidArgument, "fit needs at least 7 points");
    }
    double vmin = values[0];
    double vmax = values[0];
    for (const double v : values) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (vmax == vmin) {
        throw Error(ErrorCode::DegenerateSeries, "series is constant; nothing to fit");
    }
    if (!(vmax > 0.0)) {
        throw Error(ErrorCode::DegenerateSeries, "series has no positive maximum");
    }

    double center;
    double height;
    double width;
    try {
        const PeakInfo peak = peak_and_hwhm(series);
        center = peak.peak_delta;
        height = peak.height;
        width = peak.hwhm;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoHalfCrossing) throw;
        // Line wider than the grid: seed the width with a quarter span.
        const std::size_t peak = peak_index(series);
        center = grid.value(peak);
        height = values[peak];
        width = 0.25 * (grid.max() - grid.min());
    }
    // At the center the model equals A/w, so A starts at height * width.
    double amp = height * width;

    const std::size_t count = values.size();
    const auto residual_sq = [&](double a, double c, double w) {
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double d = grid.value(i) - c;
            const double r = a * w / (w * w + d * d) - values[i];
            acc += r * r;
        }
        return acc;
    };

    double cost = residual_sq(amp, center, width);
    double damping = 1e-3;
    const double damping_limit = 1e12;

    for (int iteration = 0; iteration < 200; ++iteration) {
        // Normal equations J^T J and J^T r for the current parameters.
        SquareMatrix<3, double> normal;
        Vector<3, double> gradient{};
        for (std::size_t i = 0; i < count; ++i) {
            const double d = grid.value(i) - center;
            const double denom = width * width + d * d;
            const double model = amp * width / denom;
            const double r = model - values[i];
            const Vector<3, double> jac{
                width / denom,
                amp * width * 2.0 * d / (denom * denom),
                amp * (d * d - width * width) / (denom * denom),
            };
            for (std::size_t p = 0; p < 3; ++p) {
                gradient[p] += jac[p] * r;
                for (std::size_t q = 0; q < 3; ++q) normal(p, q) += jac[p] * jac[q];
            }
        }

        bool stepped = false;
        while (damping <= damping_limit) {
            SquareMatrix<3, double> damped = normal;
            for (std::size_t p = 0; p < 3; ++p) {
                damped(p, p) += damping * std::max(normal(p, p), 1e-30);
            }
            Vector<3, double> step{};
            try {
                Vector<3, double> neg{-gradient[0], -gradient[1], -gradient[2]};
                step = solve_linear(damped, neg);
            } catch (const Error&) {
                damping *= 10.0;
                continue;
            }
            const double amp_next = amp + step[0];
            const double center_next = center + step[1];
            const double width_next = width + step[2];
            if (!(amp_next > 0.0) || !(width_next > 0.0)) {
                damping *= 10.0;
                continue;
            }
            const double cost_next = residual_sq(amp_next, center_next, width_next);
            if (cost_next <= cost) {
                const double step_norm = std::sqrt(step[0] * step[0] + step[1] * step[1] +
                                                   step[2] * step[2]);
                const double param_norm = std::sqrt(amp * amp + center * center + width * width);
                amp = amp_next;
                center = center_next;
                width = width_next;
                cost = cost_next;
                damping = std::max(damping * 0.1, 1e-12);
                stepped = true;
                if (step_norm < 1e-10 * (param_norm + 1e-30)) {
                    iteration = 200;  // converged
                }
                break;
            }
            damping *= 10.0;
        }
        if (!stepped) {
            throw Error(ErrorCode::FitDiverged, "damping exhausted without cost decrease");
        }
    }

    return {amp, center, width, std::sqrt(cost / double(count))};
}

/// Spectrum variants exposed on the command line. The first three are
/// analytic; `numeric` runs the quadrature over the superoperator correlator.
enum class SpectrumMode { paper, consistent, exact, numeric };

inline const char* to_string(SpectrumMode mode) {
    switch (mode) {
        case SpectrumMode::paper: return "paper";
        case SpectrumMode::consistent: return "consistent";
        case SpectrumMode::exact: return "exact";
        case SpectrumMode::numeric: return "numeric";
    }
    return "unknown";
}

inline SpectrumMode parse_spectrum_mode(const std::string& text) {
    if (text == "paper") return SpectrumMode::paper;
    if (text == "consistent") return SpectrumMode::consistent;
    if (text == "exact") return SpectrumMode::exact;
    if (text == "numeric") return SpectrumMode::numeric;
    throw Error(ErrorCode::InvalidFlag, "unknown mode '" + text + "'");
}

/// Quadrature horizon guaranteeing a sub-1e-10 relative correlator tail for
/// every mode: max(40 / slowest decay rate, 8 / gamma). The slowest rate is
/// the narrow eigenmode gamma (N + 1/2 - M) in all modes.
inline double default_tau_max(const ReservoirParams& params) {
    const double slowest = coherence_rates(params).sum_mode;
    return std::max(40.0 / slowest, 8.0 / params.decay_rate());
}

/// Sample one spectrum mode over a grid. tau_max <= 0 selects the default
/// horizon; tau_max and tau_steps only matter for the numeric mode.
inline SpectrumSeries spectrum_series(const ReservoirParams& params, SpectrumMode mode,
                                      const DetuningGrid& grid, double tau_max = 0.0,
                                      std::size_t tau_steps = 16000) {
    if (mode == SpectrumMode::numeric) {
        if (tau_max <= 0.0) tau_max = default_tau_max(params);
        return spectrum_numeric([&](double tau) { return correlator_numeric(params, tau); }, grid,
                                tau_max, tau_steps);
    }
    SpectrumSeries series{grid, std::vector<double>(grid.size(), 0.0), false};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double delta = grid.value(i);
        switch (mode) {
            case SpectrumMode::paper: series.values[i] = spectrum_paper(params, delta); break;
            case SpectrumMode::consistent:
                series.values[i] = spectrum_consistent(params, delta);
                break;
            case SpectrumMode::exact: series.values[i] = spectrum_exact(params, delta); break;
            case SpectrumMode::numeric: break;  // handled above
        }
    }
    return series;
}

}  // namespace sqspec
