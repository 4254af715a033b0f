#pragma once

namespace stratvar {

/// Standard normal quantile Phi^{-1}(p) for p in (0,1), |error| < 1e-9.
/// Rational approximation polished by one Halley step on the CDF.
/// Throws OutOfRange outside (0,1).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace stratvar
