#pragma once

#include <cmath>

#include "sqspec/master_equation.hpp"

namespace sqspec {

/// Linewidth parameters of the coherence equations of motion:
/// a = 2 gamma (N - M + 1/2) governs the sum mode, which decays as
/// exp(-a tau / 2); b = gamma M is the cross coupling between the raising
/// and lowering expectations.
struct BlochCoefficients {
    double a;
    double b;
};

inline BlochCoefficients bloch_coefficients(const ReservoirParams& params) {
    const double gamma = params.decay_rate();
    return {2.0 * gamma * (params.mean_photon_number() - params.squeezing_magnitude() + 0.5),
            gamma * params.squeezing_magnitude()};
}

/// Pair of coherence-type expectation values evolving under the coupled
/// first-order system
///   d<s+>/dtau = -gamma (N + 1/2) <s+> + gamma M <s->,
///   d<s->/dtau = -gamma (N + 1/2) <s-> + gamma M <s+>.
/// The same pair carries two-time correlators through the regression step,
/// with `raising` then playing the role of <s+(t) s+(t+tau)> and `lowering`
/// that of <s+(t) s-(t+tau)>.
struct CoherencePair {
    Complex raising;   // u
    Complex lowering;  // v
};

/// Decay rates of the two eigenmodes: the sum u+v decays at
/// gamma (N + 1/2 - M) = a/2, the difference u-v at gamma (N + 1/2 + M).
struct CoherenceRates {
    double sum_mode;
    double difference_mode;
};

inline CoherenceRates coherence_rates(const ReservoirParams& params) {
    const double base = params.decay_rate() * (params.mean_photon_number() + 0.5);
    const double split = params.decay_rate() * params.squeezing_magnitude();
    return {base - split, base + split};
}

/// Exact solution of the coherence system at delay tau via its eigenmodes.
/// Working with exp(-rate tau) of each mode avoids the overflowing
/// cosh/sinh factorization at large M tau.
inline CoherencePair coherence_evolve(const ReservoirParams& params, const CoherencePair& init,
                                      double tau) {
    if (tau < 0.0) {
        throw Error(ErrorCode::NegativeTau, "delay tau must be non-negative");
    }
    const CoherenceRates rates = coherence_rates(params);
    const Complex sum = (init.raising + init.lowering) * std::exp(-rates.sum_mode * tau);
    const Complex diff = (init.raising - init.lowering) * std::exp(-rates.difference_mode * tau);
    return {0.5 * (sum + diff), 0.5 * (sum - diff)};
}

/// Steady-state dipole correlator <s+(t) s-(t+tau)> in the single-exponential
/// closed form rho_a(inf) exp(-a tau / 2). This form drops the companion
/// <s+(t) s+(t+tau)> correlator, which is exact only for M = 0.
inline double correlator_paper(const ReservoirParams& params, double tau) {
    if (tau < 0.0) {
        throw Error(ErrorCode::NegativeTau, "delay tau must be non-negative");
    }
    const BlochCoefficients coeffs = bloch_coefficients(params);
    return params.steady_upper_population() * std::exp(-0.5 * coeffs.a * tau);
}

/// Steady-state dipole correlator from the full regression solution with
/// initial data (u, v)(0) = (0, rho_a(inf)):
///   rho_a(inf) exp(-gamma (N+1/2) tau) cosh(gamma M tau),
/// evaluated as the mean of the two eigenmode exponentials.
inline double correlator_exact(const ReservoirParams& params, double tau) {
    if (tau < 0.0) {
        throw Error(ErrorCode::NegativeTau, "delay tau must be non-negative");
    }
    const CoherenceRates rates = coherence_rates(params);
    return params.steady_upper_population() * 0.5 *
           (std::exp(-rates.sum_mode * tau) + std::exp(-rates.difference_mode * tau));
}

/// Superoperator realization of the regression theorem:
///   Tr(sigma- exp(L tau)[rho_ss sigma+]).
/// Serves as the numeric oracle for both closed forms.
inline Complex correlator_numeric(const ReservoirParams& params, double tau) {
    if (tau < 0.0) {
        throw Error(ErrorCode::NegativeTau, "delay tau must be non-negative");
    }
    const Liouvillian gen = build_liouvillian(params);
    const SquareMatrix<2> seed = steady_state(gen).matrix() * sigma_plus();
    const Liouvillian propagator = expm(gen * Complex(tau));
    const SquareMatrix<2> propagated = unvec(propagator * vec(seed));
    return (sigma_minus() * propagated).trace();
}

}  // namespace sqspec
