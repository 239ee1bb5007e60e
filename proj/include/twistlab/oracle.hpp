#pragma once

// Brute-force reference for the reduced twist map. The joint atom + light
// state is evolved through the actual pass sequence under H = alpha Jz Sz,
// then the light is traced out. Two routes:
//
//  * coherent branches: for each Dicke level M the light stays a product of
//    coherent states, so the state is sum_M c_M |b+(M), b-(M)> |S,M>;
//  * a truncated two-mode Fock lattice with no coherent-state shortcut.
//
// The light starts x-polarized with amplitude sqrt(J) in each circular mode
// (2J photons on average). The spin starts in the x-polarized CSS.

#include <cstddef>
#include <vector>

#include "twistlab/spin_core.hpp"

namespace twistlab::oracle {

// Oracle inputs are limited to small spins.
inline constexpr int kMaxTwoS = 8;

struct CoherentBranch {
    int two_m = 0;
    Complex coefficient;   // c_M
    Complex beta_plus;     // sigma+ mode amplitude
    Complex beta_minus;    // sigma- mode amplitude
};

struct CoherentBranchState {
    SpinMagnitude spin;
    std::vector<CoherentBranch> branches;  // M ascending
};

CoherentBranchState initial_branch_state(SpinMagnitude spin, double j_half);
// exp(-i alpha t Jz Sz): each branch picks up mode phases -+ alpha t M / 2.
void apply_interaction(CoherentBranchState& state, double alpha_t);
// exp(-i (pi/2) Jx) on the two circular modes.
void apply_local_operation(CoherentBranchState& state);
// Tr_light |psi><psi| using coherent-state overlaps.
SpinDensityMatrix reduce(const CoherentBranchState& state);

SpinDensityMatrix coherent_branch_evolve(SpinMagnitude spin, double j_half, double alpha_t1,
                                         double alpha_t2);

// Largest (n_cut + 1)^2 (2S + 1) accepted by fock_evolve.
inline constexpr std::size_t kMaxLatticeSize = 1'000'000;
inline constexpr double kLeakageWarning = 1e-8;

struct FockEvolveResult {
    SpinDensityMatrix rho;
    // Probability of the initial light state lost to the truncation.
    double leakage = 0.0;
    bool leakage_warning = false;
};

// The lattice keeps every two-mode Fock state with n+ + n- <= n_cut, so the
// polarization rotation (which conserves n+ + n-) is exactly unitary on it.
// mean_photons is the total 2J.
FockEvolveResult fock_evolve(SpinMagnitude spin, double mean_photons, int n_cut,
                             double alpha_t1, double alpha_t2);

double max_abs_deviation(const SpinDensityMatrix& a, const SpinDensityMatrix& b);

struct ConvergencePoint {
    double alpha_t = 0.0;
    double j_half = 0.0;
    double max_abs_deviation = 0.0;
};

// Equal pass strengths alpha_t with J = mu / alpha_t^2, compared with the
// reduced map at mu = mu' = mu.
std::vector<ConvergencePoint> convergence_study(SpinMagnitude spin, double mu,
                                                const std::vector<double>& alpha_ts);

}  // namespace twistlab::oracle
