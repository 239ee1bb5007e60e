#pragma once

// Hot loops, in two flavours each: a plain serial reference and an OpenMP
// version. The library routes through the parallel versions; the serial
// ones stay for cross-checking and for the benchmark.
//
// The twist map is elementwise, so both flavours produce bitwise identical
// output. The parallel QPD uses a Fourier-in-phi factorisation and agrees
// with the direct serial sum to rounding.

#include <cmath>
#include <span>
#include <vector>

#include "twistlab/spin_core.hpp"

namespace twistlab::kernels {

// sigma(M, M') from the integer labels 2M, 2M'. The exponents are formed
// in exact integer arithmetic before conversion.
inline Complex sigma_factor(int two_m, int two_m_prime, double mu, double mu_prime) {
    if (two_m == two_m_prime) return {1.0, 0.0};
    const long long dm = static_cast<long long>(two_m) - two_m_prime;
    const long long dsq = static_cast<long long>(two_m) * two_m -
                          static_cast<long long>(two_m_prime) * two_m_prime;
    const double decay = std::exp(-mu_prime * static_cast<double>(dm * dm) / 8.0);
    return std::polar(decay, -mu * static_cast<double>(dsq) / 8.0);
}

// out(M,M') = sigma(M,M') * in(M,M') with
// sigma = exp(-mu' (M-M')^2 / 2) exp(-i mu (M^2 - M'^2) / 2).
// Diagonal entries are copied untouched. in and out may alias.
void twist_map_serial(SpinMagnitude spin, double mu, double mu_prime,
                      std::span<const Complex> in, std::span<Complex> out);
void twist_map_parallel(SpinMagnitude spin, double mu, double mu_prime,
                        std::span<const Complex> in, std::span<Complex> out);

// Q(theta_i, phi_j) = <theta,phi| rho |theta,phi>, row-major over theta.
std::vector<double> qpd_serial(const SpinDensityMatrix& rho, std::span<const double> thetas,
                               std::span<const double> phis);
std::vector<double> qpd_parallel(const SpinDensityMatrix& rho, std::span<const double> thetas,
                                 std::span<const double> phis);

// Threads the parallel kernels will use (omp_get_max_threads, or 1).
int max_threads();
void set_threads(int n);

}  // namespace twistlab::kernels
