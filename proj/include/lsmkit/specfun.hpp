#pragma once

#include <complex>

namespace lsm::specfun {

// Highest supported order. The cylinder series truncates near ceil(k*a)+15,
// which stays below ~45 for the frequencies this toolkit targets.
inline constexpr int kMaxOrder = 200;

// Bessel function of the first kind, integer order n >= 0, x > 0.
// Absolute error < 1e-9 for n in {0,1} on x in [0.05, 60].
// Throws std::domain_error for x <= 0, n < 0 or n > kMaxOrder.
double bessel_j(int n, double x);

// Bessel function of the second kind; same domain and accuracy contract.
double bessel_y(int n, double x);

// Hankel function of the second kind: J_n(x) - i*Y_n(x).
std::complex<double> hankel2(int n, double x);

// d/dx J_n(x) and d/dx H2_n(x), needed by the cylinder-mode matching.
double bessel_j_prime(int n, double x);
std::complex<double> hankel2_prime(int n, double x);

// All of J_0..J_nmax at one argument, one consistent recurrence sweep.
void bessel_j_all(int nmax, double x, double* out);
void bessel_y_all(int nmax, double x, double* out);

} // namespace lsm::specfun
