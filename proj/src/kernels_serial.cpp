#include <cmath>
#include <string>

#include "twistlab/errors.hpp"
#include "twistlab/kernels.hpp"

namespace twistlab::kernels {

namespace {

void check_sizes(SpinMagnitude spin, std::span<const Complex> in, std::span<Complex> out) {
    const std::size_t n = spin.dim() * spin.dim();
    if (in.size() != n || out.size() != n) {
        throw InvalidArgument("twist map buffers must hold " + std::to_string(n) + " elements");
    }
}

}  // namespace

void twist_map_serial(SpinMagnitude spin, double mu, double mu_prime,
                      std::span<const Complex> in, std::span<Complex> out) {
    check_sizes(spin, in, out);
    const std::size_t d = spin.dim();
    for (std::size_t i = 0; i < d; ++i) {
        const int two_m = spin.two_m_at(i);
        for (std::size_t j = 0; j < d; ++j) {
            const std::size_t k = i * d + j;
            out[k] = (i == j) ? in[k] : sigma_factor(two_m, spin.two_m_at(j), mu, mu_prime) * in[k];
        }
    }
}

std::vector<double> qpd_serial(const SpinDensityMatrix& rho, std::span<const double> thetas,
                               std::span<const double> phis) {
    const std::size_t d = rho.dim();
    std::vector<double> out;
    out.reserve(thetas.size() * phis.size());
    for (double theta : thetas) {
        for (double phi : phis) {
            const auto c = coherent_amplitudes(rho.spin(), theta, phi);
            Complex q{};
            for (std::size_t i = 0; i < d; ++i) {
                Complex row{};
                for (std::size_t j = 0; j < d; ++j) row += rho(i, j) * c[j];
                q += std::conj(c[i]) * row;
            }
            out.push_back(q.real());
        }
    }
    return out;
}

}  // namespace twistlab::kernels
