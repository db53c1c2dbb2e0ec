#pragma once

// Umbrella header for the whole library.

#include "sqspec/atomic_algebra.hpp"
#include "sqspec/bloch_correlation.hpp"
#include "sqspec/csv.hpp"
#include "sqspec/density_matrix.hpp"
#include "sqspec/errors.hpp"
#include "sqspec/master_equation.hpp"
#include "sqspec/matrix.hpp"
#include "sqspec/spectrum.hpp"
#include "sqspec/validation.hpp"
