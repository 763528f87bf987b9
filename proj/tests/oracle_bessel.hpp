#pragma once

// Test-only Bessel oracles, independent of lsm::specfun. Two routes:
//   - long-double power series (J) and series-with-log (Y0, Y1), x <= 9
//   - quadrature of the Bessel / Mehler-Sonine integral representations
//     (A&S 9.1.21, 9.1.23) via composite Gauss-Legendre, x > 9
// The two routes overlap on [5, 9] so they can also validate each other.

namespace oracle {

double bessel_j_series(int n, double x);
double bessel_y0_series(double x);
double bessel_y1_series(double x);

double bessel_j_integral(int n, double x);
double bessel_y_integral(int n, double x); // n in {0, 1}

// Route selector used by the acceptance sweep.
double bessel_j(int n, double x);
double bessel_y(int n, double x);

} // namespace oracle
