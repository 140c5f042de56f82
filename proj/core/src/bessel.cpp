#include "gelfand/bessel.hpp"

#include "gelfand/errors.hpp"

#include <cmath>
#include <numbers>

namespace gelfand::spectrum {

namespace {

constexpr double kSeriesLimit = 8.0;

double series(int n, double x) {
  const long double half = 0.5L * x;
  const long double q = -half * half;
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= half / k;
  long double sum = term;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<long double>(k) * (k + n));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return static_cast<double>(sum);
}

double periodic_trapezoid(int n, double x) {
  const int points = 2 * static_cast<int>(x + n) + 64;
  const double dt = std::numbers::pi / points;
  double sum = 0.5 * (1.0 + std::cos(n * std::numbers::pi));  // t = 0 and t = pi
  for (int j = 1; j < points; ++j) {
    const double t = j * dt;
    sum += std::cos(n * t - x * std::sin(t));
  }
  return sum / points;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0) throw InvalidSpec("Bessel order must be non-negative");
  if (x < 0.0) throw InvalidSpec("Bessel argument must be non-negative");
  return x <= kSeriesLimit ? series(n, x) : periodic_trapezoid(n, x);
}

double bessel_zero(int n, int m) {
  if (n < 0 || m < 1) throw InvalidSpec("bessel_zero needs n >= 0 and m >= 1");
  // Consecutive zeros are more than pi apart, so a 0.25 scan cannot skip one.
  constexpr double scan = 0.25;
  double lo = n + 0.1;
  double f_lo = bessel_j(n, lo);
  int found = 0;
  for (;;) {
    const double hi = lo + scan;
    const double f_hi = bessel_j(n, hi);
    if (f_lo == 0.0) {
      if (++found == m) return lo;
    } else if ((f_lo < 0.0) != (f_hi < 0.0) && f_hi != 0.0) {
      if (++found == m) {
        double a = lo, b = hi, fa = f_lo;
        while (b - a > 1e-15 * b) {
          const double mid = 0.5 * (a + b);
          const double fm = bessel_j(n, mid);
          if (fm == 0.0) return mid;
          if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
          } else {
            b = mid;
          }
        }
        return 0.5 * (a + b);
      }
    }
    lo = hi;
    f_lo = f_hi;
  }
}

}  // namespace gelfand::spectrum
