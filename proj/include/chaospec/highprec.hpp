#pragma once

#include <boost/multiprecision/mpfr.hpp>

// Arbitrary-precision scalar used for the alternating power-series work in
// the she module.  Precision is per-variable (mpfr), selected from the
// digit budget 30 + beta^4 t; nothing here is shared across threads.

namespace chaospec {

using BigFloat = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

// A fresh BigFloat at the given decimal precision.  Results of arithmetic
// inherit the precision of their operands, so seeding every input through
// big() pins the whole computation to the requested digit count without
// touching the process-global default (which would not be thread-safe).
inline BigFloat big(unsigned digits10, double v = 0.0) {
  return BigFloat(v, digits10);
}

}  // namespace chaospec
