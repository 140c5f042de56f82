#pragma once

namespace gelfand::spectrum {

/// J_n(x) for n >= 0, x >= 0. Ascending series for small arguments; the
/// periodic integral representation J_n(x) = (1/pi) int_0^pi cos(n t - x sin t) dt
/// with the trapezoidal rule (spectrally accurate) elsewhere.
double bessel_j(int n, double x);

/// m-th positive zero of J_n (n >= 0, m >= 1), to about 1e-14: sign-change
/// scan followed by bisection. Throws InvalidSpec for n < 0 or m < 1.
double bessel_zero(int n, int m);

}  // namespace gelfand::spectrum
