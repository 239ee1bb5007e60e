#include <cmath>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "twistlab/errors.hpp"
#include "twistlab/kernels.hpp"

namespace twistlab::kernels {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
    if (n < 1) throw InvalidArgument("thread count must be >= 1, got " + std::to_string(n));
#ifdef _OPENMP
    omp_set_num_threads(n);
#endif
}

void twist_map_parallel(SpinMagnitude spin, double mu, double mu_prime,
                        std::span<const Complex> in, std::span<Complex> out) {
    const std::size_t d = spin.dim();
    if (in.size() != d * d || out.size() != d * d) {
        throw InvalidArgument("twist map buffers must hold " + std::to_string(d * d) + " elements");
    }
    const long long rows = static_cast<long long>(d);

#pragma omp parallel for schedule(static)
    for (long long r = 0; r < rows; ++r) {
        const std::size_t i = static_cast<std::size_t>(r);
        const int two_m = spin.two_m_at(i);
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t k = i * d + j;
            out[k] = (i == j) ? in[k] : sigma_factor(two_m, spin.two_m_at(j), mu, mu_prime) * in[k];
        }
    }
}

std::vector<double> qpd_parallel(const SpinDensityMatrix& rho, std::span<const double> thetas,
                                 std::span<const double> phis) {
    const SpinMagnitude spin = rho.spin();
    const std::size_t d = rho.dim();
    const int n = spin.two_s();
    const auto log_binom = log_binomials(spin);
    for (double theta : thetas) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
            throw InvalidArgument("polar angle must lie in [0, pi], got " + std::to_string(theta));
        }
    }

    const std::size_t n_phi = phis.size();
    std::vector<double> out(thetas.size() * n_phi);
    const long long rows = static_cast<long long>(thetas.size());

    // With c_M = b_M(theta) e^{-i M phi}:
    //   Q = sum_{i,j} b_i b_j rho_ij e^{i (i-j) phi} = F_0 + 2 Re sum_{k>0} F_k e^{i k phi},
    // F_k = sum_{i-j=k} b_i b_j rho_ij.
#pragma omp parallel for schedule(dynamic, 1)
    for (long long r = 0; r < rows; ++r) {
        const double theta = thetas[static_cast<std::size_t>(r)];
        const double log_cos = std::log(std::cos(0.5 * theta));
        const double log_sin = std::log(std::sin(0.5 * theta));
        std::vector<double> b(d);
        for (int k = 0; k <= n; ++k) {
            double lm = 0.5 * log_binom[static_cast<std::size_t>(k)];
            if (k > 0) lm += k * log_cos;
            if (n - k > 0) lm += (n - k) * log_sin;
            b[static_cast<std::size_t>(k)] = std::exp(lm);
        }
        std::vector<Complex> band(d);
        for (std::size_t k = 0; k < d; ++k) {
            Complex f{};
            for (std::size_t j = 0; j + k < d; ++j) f += b[j + k] * b[j] * rho(j + k, j);
            band[k] = f;
        }
        double* row = out.data() + static_cast<std::size_t>(r) * n_phi;
        for (std::size_t p = 0; p < n_phi; ++p) {
            const double phi = phis[p];
            double q = band[0].real();
            for (std::size_t k = 1; k < d; ++k) {
                q += 2.0 * (band[k] * std::polar(1.0, static_cast<double>(k) * phi)).real();
            }
            row[p] = q;
        }
    }
    return out;
}

}  // namespace twistlab::kernels
