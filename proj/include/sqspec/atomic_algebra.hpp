#pragma once

#include "sqspec/matrix.hpp"

namespace sqspec {

/// Operator on the two-level atom, written in the {|a>, |b>} basis with the
/// upper level |a> first (row/column 0).
using AtomOperator = SquareMatrix<2>;

/// Raising operator |a><b|.
inline AtomOperator sigma_plus() {
    AtomOperator op;
    op(0, 1) = 1.0;
    return op;
}

/// Lowering operator |b><a|.
inline AtomOperator sigma_minus() {
    AtomOperator op;
    op(1, 0) = 1.0;
    return op;
}

/// Inversion operator, defined as the commutator of raising and lowering:
/// diag(1, -1).
inline AtomOperator sigma_z() {
    AtomOperator op;
    op(0, 0) = 1.0;
    op(1, 1) = -1.0;
    return op;
}

inline AtomOperator identity_op() { return AtomOperator::identity(); }

inline AtomOperator commutator(const AtomOperator& a, const AtomOperator& b) {
    return a * b - b * a;
}

inline AtomOperator dagger(const AtomOperator& a) { return a.adjoint(); }

}  // namespace sqspec
