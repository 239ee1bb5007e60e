#pragma once

// Collective spin in the Dicke basis |S,M>.
//
// Half-integer spins are exact: everything is keyed by two_s = 2S and
// two_m = 2M. Matrix rows and columns run over M ascending from -S, so
// index i corresponds to two_m = -two_s + 2 i.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace twistlab {

using Complex = std::complex<double>;

class SpinMagnitude {
public:
    explicit SpinMagnitude(int two_s);

    // Accepts S as a double; 2S must be a positive integer (to 1e-9).
    static SpinMagnitude from_spin(double s);

    int two_s() const noexcept { return two_s_; }
    double value() const noexcept { return 0.5 * two_s_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(two_s_) + 1; }

    int two_m_at(std::size_t index) const noexcept {
        return -two_s_ + 2 * static_cast<int>(index);
    }
    // Throws InvalidArgument if two_m is out of range or of the wrong parity.
    std::size_t index_of(int two_m) const;
    double m_at(std::size_t index) const noexcept { return 0.5 * two_m_at(index); }

    friend bool operator==(SpinMagnitude, SpinMagnitude) = default;

private:
    int two_s_;
};

class SpinDensityMatrix {
public:
    // Zero matrix of the right shape.
    explicit SpinDensityMatrix(SpinMagnitude spin);
    // Row-major elements, (2S+1)^2 of them.
    SpinDensityMatrix(SpinMagnitude spin, std::vector<Complex> elements);

    SpinMagnitude spin() const noexcept { return spin_; }
    std::size_t dim() const noexcept { return spin_.dim(); }

    Complex operator()(std::size_t row, std::size_t col) const noexcept {
        return elements_[row * dim() + col];
    }
    Complex& operator()(std::size_t row, std::size_t col) noexcept {
        return elements_[row * dim() + col];
    }
    Complex element(int two_m, int two_m_prime) const;

    std::span<const Complex> elements() const noexcept { return elements_; }
    std::span<Complex> elements() noexcept { return elements_; }

    Complex trace() const noexcept;
    double hermiticity_error() const noexcept;
    double purity() const noexcept;
    std::vector<double> diagonal() const;

    // Throws NumericError if trace or Hermiticity are off by more than tol.
    void check_invariants(double tol = 1e-12) const;

private:
    SpinMagnitude spin_;
    std::vector<Complex> elements_;
};

struct SpinMomentSet {
    std::array<double, 3> mean{};                  // <Sx>, <Sy>, <Sz>
    std::array<std::array<double, 3>, 3> second{}; // <(Si Sj + Sj Si)/2>

    double variance(std::size_t axis) const noexcept {
        return second[axis][axis] - mean[axis] * mean[axis];
    }
    double covariance(std::size_t a, std::size_t b) const noexcept {
        return second[a][b] - mean[a] * mean[b];
    }
    double casimir() const noexcept { return second[0][0] + second[1][1] + second[2][2]; }
};

// Largest Dicke dimension 2S+1 for which dense matrices are built.
inline constexpr std::size_t kDefaultMaxDim = 4097;

// ln binom(2S, S+M) for every M (index order), via lgamma. Stays finite
// where the binomials themselves overflow.
std::vector<double> log_binomials(SpinMagnitude spin);

// <S,M|theta,phi> for |theta,phi> = exp(-i phi Sz) exp(-i theta Sy)|S,S>.
std::vector<Complex> coherent_amplitudes(SpinMagnitude spin, double theta, double phi);

// |theta,phi><theta,phi|. Throws DimensionOverflow above max_dim.
SpinDensityMatrix make_css(SpinMagnitude spin, double theta, double phi,
                           std::size_t max_dim = kDefaultMaxDim);

// x-polarized coherent state, the usual starting point.
SpinDensityMatrix make_css_x(SpinMagnitude spin, std::size_t max_dim = kDefaultMaxDim);

SpinMomentSet moments(const SpinDensityMatrix& rho);

}  // namespace twistlab
