#pragma once

#include <boost/multiprecision/mpfr.hpp>

namespace dlorenz {

/// Working precision for the rescaling machinery. Parameters enter the
/// rescaled return map multiplied by gamma^(2k); 350 decimal digits keep
/// k usable up to the |gamma|^(2k) <= 1e300 range cap with ~50 digits spare.
inline constexpr unsigned kRealDigits = 350;

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<kRealDigits>,
                                           boost::multiprecision::et_off>;

inline double to_double(const Real& r) { return r.convert_to<double>(); }
inline double to_double(double r) { return r; }

}  // namespace dlorenz
