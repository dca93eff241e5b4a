#ifndef SINKJA_SINKJA_HPP
#define SINKJA_SINKJA_HPP

// Umbrella header: lifted LP relaxation of the quadratic assignment problem
// solved by alternating KL projections with an exponential-accumulation
// outer scheme, plus QAPLIB I/O and rounding utilities.

#include "sinkja/assignment.hpp"
#include "sinkja/lifted.hpp"
#include "sinkja/log_space.hpp"
#include "sinkja/lp_solve.hpp"
#include "sinkja/projection.hpp"
#include "sinkja/qap.hpp"
#include "sinkja/qaplib.hpp"

#endif
