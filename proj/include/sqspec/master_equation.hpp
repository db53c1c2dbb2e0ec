#pragma once

#include <cmath>

#include "sqspec/atomic_algebra.hpp"
#include "sqspec/density_matrix.hpp"
#include "sqspec/errors.hpp"
#include "sqspec/matrix.hpp"

namespace sqspec {

/// Reservoir coupling parameters for the dissipative generator: the atomic
/// decay rate gamma, the reservoir mean photon number N, and the squeezing
/// correlation magnitude M (taken real and non-negative; a thermal reservoir
/// is M = 0 with N the thermal occupation). Physical squeezed reservoirs
/// satisfy M^2 <= N(N+1), which construction enforces.
class ReservoirParams {
public:
    ReservoirParams(double decay_rate, double mean_photon_number, double squeezing_magnitude) {
        if (!(decay_rate > 0.0) || !std::isfinite(decay_rate)) {
            throw Error(ErrorCode::NonPositiveGamma, "decay rate gamma must be positive");
        }
        if (!(mean_photon_number >= 0.0) || !std::isfinite(mean_photon_number)) {
            throw Error(ErrorCode::NegativeN, "mean photon number N must be non-negative");
        }
        const double bound = std::sqrt(mean_photon_number * (mean_photon_number + 1.0));
        if (!(squeezing_magnitude >= 0.0) || !std::isfinite(squeezing_magnitude) ||
            squeezing_magnitude > bound * (1.0 + 1e-12)) {
            throw Error(ErrorCode::MOutOfRange,
                        "squeezing magnitude M must satisfy 0 <= M <= sqrt(N(N+1))");
        }
        gamma_ = decay_rate;
        big_n_ = mean_photon_number;
        big_m_ = squeezing_magnitude;
    }

    double decay_rate() const { return gamma_; }
    double mean_photon_number() const { return big_n_; }
    double squeezing_magnitude() const { return big_m_; }

    /// Physicality bound sqrt(N(N+1)) on the squeezing magnitude.
    double max_squeezing() const { return std::sqrt(big_n_ * (big_n_ + 1.0)); }

    bool is_thermal() const { return big_m_ == 0.0; }

    /// Steady-state upper-level population N/(2N+1).
    double steady_upper_population() const { return big_n_ / (2.0 * big_n_ + 1.0); }

private:
    double gamma_;
    double big_n_;
    double big_m_;
};

inline ReservoirParams validate_params(double gamma, double big_n, double big_m) {
    return ReservoirParams(gamma, big_n, big_m);
}

/// Form of the squeezing (M) contribution to the generator.
///
/// `hermitian` is the physically consistent choice sigma+ rho sigma+ +
/// sigma- rho sigma-: it preserves Hermiticity of rho and yields the
/// coherence equations of motion with a +gamma*M cross coupling in both.
/// `literal` is the difference form sigma- rho sigma- - sigma+ rho sigma+,
/// kept only for reference: it maps Hermitian matrices to non-Hermitian ones
/// and flips the cross-coupling sign in one of the two coherence equations.
enum class SqueezedTermForm { hermitian, literal };

/// Right-hand side of the master equation,
///   d rho/dt = (gamma/2)(N+1) D[sigma-] rho + (gamma/2) N D[sigma+] rho
///              + gamma M (sigma+ rho sigma+ + sigma- rho sigma-),
/// with D[c] rho = 2 c rho c^dag - c^dag c rho - rho c^dag c.
inline AtomOperator lindblad_rhs(const ReservoirParams& params, const SquareMatrix<2>& rho,
                                 SqueezedTermForm form = SqueezedTermForm::hermitian) {
    const double gamma = params.decay_rate();
    const double big_n = params.mean_photon_number();
    const double big_m = params.squeezing_magnitude();

    const AtomOperator sp = sigma_plus();
    const AtomOperator sm = sigma_minus();
    const AtomOperator up_proj = sp * sm;  // |a><a|
    const AtomOperator dn_proj = sm * sp;  // |b><b|

    AtomOperator rhs =
        (0.5 * gamma * (big_n + 1.0)) * (2.0 * (sm * rho * sp) - up_proj * rho - rho * up_proj) +
        (0.5 * gamma * big_n) * (2.0 * (sp * rho * sm) - dn_proj * rho - rho * dn_proj);
    if (big_m != 0.0) {
        if (form == SqueezedTermForm::hermitian) {
            rhs += (gamma * big_m) * (sp * rho * sp + sm * rho * sm);
        } else {
            rhs += (gamma * big_m) * (sm * rho * sm - sp * rho * sp);
        }
    }
    return rhs;
}

inline AtomOperator lindblad_rhs(const ReservoirParams& params, const DensityMatrix& rho,
                                 SqueezedTermForm form = SqueezedTermForm::hermitian) {
    return lindblad_rhs(params, rho.matrix(), form);
}

/// Generator in matrix form, acting on the column-stacked density matrix.
using Liouvillian = SquareMatrix<4>;

/// Column stacking, column |a> first: vec(rho) = (rho_aa, rho_ba, rho_ab, rho_bb).
inline Vector<4> vec(const SquareMatrix<2>& m) {
    return {m(0, 0), m(1, 0), m(0, 1), m(1, 1)};
}

inline SquareMatrix<2> unvec(const Vector<4>& v) {
    SquareMatrix<2> m;
    m(0, 0) = v[0];
    m(1, 0) = v[1];
    m(0, 1) = v[2];
    m(1, 1) = v[3];
    return m;
}

/// 4x4 matrix L with L vec(rho) = vec(lindblad_rhs(params, rho)) for every rho.
/// Built from vec(A X B) = (B^T kron A) vec(X).
inline Liouvillian build_liouvillian(const ReservoirParams& params,
                                     SqueezedTermForm form = SqueezedTermForm::hermitian) {
    const double gamma = params.decay_rate();
    const double big_n = params.mean_photon_number();
    const double big_m = params.squeezing_magnitude();

    const AtomOperator sp = sigma_plus();
    const AtomOperator sm = sigma_minus();
    const AtomOperator up_proj = sp * sm;
    const AtomOperator dn_proj = sm * sp;
    const AtomOperator eye = identity_op();

    const auto sandwich = [](const AtomOperator& left, const AtomOperator& right) {
        return kron(right.transpose(), left);
    };

    Liouvillian gen =
        (0.5 * gamma * (big_n + 1.0)) *
            (2.0 * sandwich(sm, sp) - sandwich(up_proj, eye) - sandwich(eye, up_proj)) +
        (0.5 * gamma * big_n) *
            (2.0 * sandwich(sp, sm) - sandwich(dn_proj, eye) - sandwich(eye, dn_proj));
    if (big_m != 0.0) {
        if (form == SqueezedTermForm::hermitian) {
            gen += (gamma * big_m) * (sandwich(sp, sp) + sandwich(sm, sm));
        } else {
            gen += (gamma * big_m) * (sandwich(sm, sm) - sandwich(sp, sp));
        }
    }
    return gen;
}

/// Unique fixed point of the generator with unit trace. The last row of
/// L vec(rho) = 0 is replaced by the trace constraint (1,0,0,1)|1 and the
/// resulting 4x4 system solved directly.
inline DensityMatrix steady_state(const Liouvillian& gen) {
    Liouvillian sys = gen;
    sys(3, 0) = 1.0;
    sys(3, 1) = 0.0;
    sys(3, 2) = 0.0;
    sys(3, 3) = 1.0;
    Vector<4> rhs{0.0, 0.0, 0.0, 1.0};
    const Vector<4> solution = solve_linear(sys, rhs);
    return DensityMatrix::from_matrix(unvec(solution));
}

/// Propagate rho0 for time t under the generator: unvec(expm(L t) vec(rho0)).
inline DensityMatrix evolve(const Liouvillian& gen, const DensityMatrix& rho0, double t) {
    if (t < 0.0) {
        throw Error(ErrorCode::NegativeTime, "propagation time must be non-negative");
    }
    const Liouvillian propagator = expm(gen * Complex(t));
    return DensityMatrix::from_matrix(unvec(propagator * vec(rho0.matrix())));
}

/// Closed-form upper-level population
///   rho_a(t) = N/(2N+1) + (rho_a(0) - N/(2N+1)) exp(-gamma (2N+1) t),
/// independent of M.
inline double upper_population(const ReservoirParams& params, double initial_upper, double t) {
    const double stationary = params.steady_upper_population();
    const double rate = params.decay_rate() * (2.0 * params.mean_photon_number() + 1.0);
    return stationary + (initial_upper - stationary) * std::exp(-rate * t);
}

}  // namespace sqspec
