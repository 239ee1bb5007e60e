#include "twistlab/oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "twistlab/errors.hpp"
#include "twistlab/twist.hpp"

namespace twistlab::oracle {

namespace {

void check_spin(SpinMagnitude spin) {
    if (spin.two_s() > kMaxTwoS) {
        throw InvalidArgument("oracle supports 2S <= " + std::to_string(kMaxTwoS) + ", got 2S = " +
                              std::to_string(spin.two_s()));
    }
}

// x-polarized CSS amplitudes sqrt(binom(2S, k)) / 2^S, by exact integer
// binomials (2S is small here).
std::vector<double> css_x_amplitudes(SpinMagnitude spin) {
    const int n = spin.two_s();
    std::vector<double> amp(spin.dim());
    unsigned long long binom = 1;
    for (int k = 0; k <= n; ++k) {
        amp[static_cast<std::size_t>(k)] = std::sqrt(static_cast<double>(binom)) / std::pow(2.0, 0.5 * n);
        binom = binom * static_cast<unsigned long long>(n - k) / static_cast<unsigned long long>(k + 1);
    }
    return amp;
}

// exp(-i (pi/4) sigma_x): the mode-space matrix of exp(-i (pi/2) Jx).
struct ModeMix {
    Complex u00, u01, u10, u11;
};

ModeMix local_operation_matrix() {
    const double c = std::cos(0.25 * std::numbers::pi);
    const double s = std::sin(0.25 * std::numbers::pi);
    return {Complex{c, 0.0}, Complex{0.0, -s}, Complex{0.0, -s}, Complex{c, 0.0}};
}

// <a|b> for single-mode coherent states.
Complex coherent_overlap(Complex a, Complex b) {
    return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

}  // namespace

CoherentBranchState initial_branch_state(SpinMagnitude spin, double j_half) {
    check_spin(spin);
    if (!(j_half >= 0.0)) throw InvalidArgument("J must be >= 0");
    const auto amp = css_x_amplitudes(spin);
    const double beta = std::sqrt(j_half);
    CoherentBranchState state{spin, {}};
    state.branches.reserve(spin.dim());
    for (std::size_t i = 0; i < spin.dim(); ++i) {
        state.branches.push_back({spin.two_m_at(i), Complex{amp[i], 0.0}, Complex{beta, 0.0},
                                  Complex{beta, 0.0}});
    }
    return state;
}

void apply_interaction(CoherentBranchState& state, double alpha_t) {
    for (auto& b : state.branches) {
        const double angle = 0.5 * alpha_t * (0.5 * b.two_m);
        b.beta_plus *= std::polar(1.0, -angle);
        b.beta_minus *= std::polar(1.0, angle);
    }
}

void apply_local_operation(CoherentBranchState& state) {
    const ModeMix u = local_operation_matrix();
    for (auto& b : state.branches) {
        const Complex p = u.u00 * b.beta_plus + u.u01 * b.beta_minus;
        const Complex m = u.u10 * b.beta_plus + u.u11 * b.beta_minus;
        b.beta_plus = p;
        b.beta_minus = m;
    }
}

SpinDensityMatrix reduce(const CoherentBranchState& state) {
    const std::size_t d = state.spin.dim();
    SpinDensityMatrix rho(state.spin);
    const long long rows = static_cast<long long>(d);
#pragma omp parallel for schedule(static)
    for (long long r = 0; r < rows; ++r) {
        const auto i = static_cast<std::size_t>(r);
        const auto& bi = state.branches[i];
        for (std::size_t j = 0; j < d; ++j) {
            const auto& bj = state.branches[j];
            const Complex light = coherent_overlap(bj.beta_plus, bi.beta_plus) *
                                  coherent_overlap(bj.beta_minus, bi.beta_minus);
            rho(i, j) = bi.coefficient * std::conj(bj.coefficient) * light;
        }
    }
    return rho;
}

SpinDensityMatrix coherent_branch_evolve(SpinMagnitude spin, double j_half, double alpha_t1,
                                         double alpha_t2) {
    auto state = initial_branch_state(spin, j_half);
    apply_interaction(state, alpha_t1);
    apply_local_operation(state);
    apply_interaction(state, alpha_t2);
    return reduce(state);
}

namespace {

// Two-mode Fock states with n+ + n- <= n_cut, stored on the full
// (n_cut+1)^2 box; entries with n+ + n- > n_cut stay zero.
class FockLattice {
public:
    FockLattice(SpinMagnitude spin, int n_cut)
        : spin_(spin), side_(static_cast<std::size_t>(n_cut) + 1),
          amp_(side_ * side_ * spin.dim()) {}

    Complex& at(std::size_t n_plus, std::size_t n_minus, std::size_t m) {
        return amp_[(n_plus * side_ + n_minus) * spin_.dim() + m];
    }
    Complex at(std::size_t n_plus, std::size_t n_minus, std::size_t m) const {
        return amp_[(n_plus * side_ + n_minus) * spin_.dim() + m];
    }
    std::size_t side() const { return side_; }
    std::size_t n_cut() const { return side_ - 1; }
    SpinMagnitude spin() const { return spin_; }

private:
    SpinMagnitude spin_;
    std::size_t side_;
    std::vector<Complex> amp_;
};

void fock_interaction(FockLattice& lat, double alpha_t) {
    const std::size_t n_cut = lat.n_cut();
    const SpinMagnitude spin = lat.spin();
    for (std::size_t np = 0; np <= n_cut; ++np) {
        for (std::size_t nm = 0; np + nm <= n_cut; ++nm) {
            const double jz = 0.5 * (static_cast<double>(np) - static_cast<double>(nm));
            for (std::size_t m = 0; m < spin.dim(); ++m) {
                lat.at(np, nm, m) *= std::polar(1.0, -alpha_t * jz * spin.m_at(m));
            }
        }
    }
}

// Column p of block N holds the image of |p, N - p> as a vector over the
// output n+ = k. Built from block N - 1 by applying the transformed
// creation operators, so no factorials appear.
std::vector<std::vector<std::vector<Complex>>> mixing_blocks(std::size_t n_cut) {
    const ModeMix u = local_operation_matrix();
    std::vector<std::vector<std::vector<Complex>>> blocks(n_cut + 1);
    blocks[0] = {{Complex{1.0, 0.0}}};
    for (std::size_t n = 1; n <= n_cut; ++n) {
        auto& block = blocks[n];
        block.assign(n + 1, std::vector<Complex>(n + 1));
        for (std::size_t p = 0; p <= n; ++p) {
            // |p, n-p> = a+^dag |p-1, n-p> / sqrt(p)  or  a-^dag |0, n-1> / sqrt(n)
            const bool via_plus = p > 0;
            const auto& src = blocks[n - 1][via_plus ? p - 1 : 0];
            const Complex to_plus = via_plus ? u.u00 : u.u01;
            const Complex to_minus = via_plus ? u.u10 : u.u11;
            const double norm = 1.0 / std::sqrt(static_cast<double>(via_plus ? p : n));
            auto& dst = block[p];
            for (std::size_t k = 0; k < n; ++k) {
                // a+^dag |k, n-1-k> = sqrt(k+1) |k+1, n-1-k>
                dst[k + 1] += to_plus * std::sqrt(static_cast<double>(k + 1)) * src[k] * norm;
                // a-^dag |k, n-1-k> = sqrt(n-k) |k, n-k>
                dst[k] += to_minus * std::sqrt(static_cast<double>(n - k)) * src[k] * norm;
            }
        }
    }
    return blocks;
}

void fock_local_operation(FockLattice& lat) {
    const std::size_t n_cut = lat.n_cut();
    const std::size_t d = lat.spin().dim();
    const auto blocks = mixing_blocks(n_cut);
    std::vector<Complex> out;
    for (std::size_t n = 0; n <= n_cut; ++n) {
        const auto& block = blocks[n];
        for (std::size_t m = 0; m < d; ++m) {
            out.assign(n + 1, Complex{});
            for (std::size_t p = 0; p <= n; ++p) {
                const Complex in = lat.at(p, n - p, m);
                if (in == Complex{}) continue;
                for (std::size_t k = 0; k <= n; ++k) out[k] += block[p][k] * in;
            }
            for (std::size_t k = 0; k <= n; ++k) lat.at(k, n - k, m) = out[k];
        }
    }
}

}  // namespace

FockEvolveResult fock_evolve(SpinMagnitude spin, double mean_photons, int n_cut,
                             double alpha_t1, double alpha_t2) {
    check_spin(spin);
    if (n_cut < 1) throw InvalidArgument("n_cut must be >= 1");
    if (!(mean_photons >= 0.0)) throw InvalidArgument("mean photon number must be >= 0");
    const std::size_t side = static_cast<std::size_t>(n_cut) + 1;
    if (side * side * spin.dim() > kMaxLatticeSize) {
        throw InvalidArgument("Fock lattice of " + std::to_string(side * side * spin.dim()) +
                              " amplitudes exceeds the cap of " + std::to_string(kMaxLatticeSize));
    }

    // Poisson amplitudes e^{-|b|^2/2} b^n / sqrt(n!) per mode, b = sqrt(J).
    const double j_half = 0.5 * mean_photons;
    const double beta = std::sqrt(j_half);
    std::vector<double> mode(side);
    mode[0] = std::exp(-0.5 * j_half);
    for (std::size_t k = 1; k < side; ++k) mode[k] = mode[k - 1] * beta / std::sqrt(static_cast<double>(k));

    double kept = 0.0;
    for (std::size_t np = 0; np < side; ++np) {
        for (std::size_t nm = 0; np + nm < side; ++nm) kept += mode[np] * mode[nm] * mode[np] * mode[nm];
    }
    const double renorm = 1.0 / std::sqrt(kept);

    const auto spin_amp = css_x_amplitudes(spin);
    FockLattice lat(spin, n_cut);
    for (std::size_t np = 0; np < side; ++np) {
        for (std::size_t nm = 0; np + nm < side; ++nm) {
            for (std::size_t m = 0; m < spin.dim(); ++m) {
                lat.at(np, nm, m) = spin_amp[m] * mode[np] * mode[nm] * renorm;
            }
        }
    }

    fock_interaction(lat, alpha_t1);
    fock_local_operation(lat);
    fock_interaction(lat, alpha_t2);

    const std::size_t d = spin.dim();
    SpinDensityMatrix rho(spin);
    for (std::size_t np = 0; np < side; ++np) {
        for (std::size_t nm = 0; np + nm < side; ++nm) {
            for (std::size_t i = 0; i < d; ++i) {
                const Complex a = lat.at(np, nm, i);
                for (std::size_t j = 0; j < d; ++j) rho(i, j) += a * std::conj(lat.at(np, nm, j));
            }
        }
    }

    FockEvolveResult result{std::move(rho), 1.0 - kept, false};
    result.leakage_warning = result.leakage > kLeakageWarning;
    return result;
}

double max_abs_deviation(const SpinDensityMatrix& a, const SpinDensityMatrix& b) {
    if (a.spin() != b.spin()) throw InvalidArgument("cannot compare states of different spin");
    double worst = 0.0;
    const auto ea = a.elements();
    const auto eb = b.elements();
    for (std::size_t k = 0; k < ea.size(); ++k) worst = std::max(worst, std::abs(ea[k] - eb[k]));
    return worst;
}

std::vector<ConvergencePoint> convergence_study(SpinMagnitude spin, double mu,
                                                const std::vector<double>& alpha_ts) {
    const SpinDensityMatrix reduced = evolve(make_css_x(spin), TwistParameters::from_mu(mu, mu));
    std::vector<ConvergencePoint> out;
    out.reserve(alpha_ts.size());
    for (double at : alpha_ts) {
        if (!(at > 0.0)) throw InvalidArgument("alpha*t must be > 0 in a convergence study");
        const double j_half = mu / (at * at);
        const auto exact = coherent_branch_evolve(spin, j_half, at, at);
        out.push_back({at, j_half, max_abs_deviation(exact, reduced)});
    }
    return out;
}

}  // namespace twistlab::oracle
