#pragma once

#include <complex>
#include <functional>
#include <optional>

#include "agesi/equilibria.hpp"

namespace agesi {

using Complex = std::complex<double>;

/// Linearization kernels Psi1..Psi4 around an equilibrium, tabulated on the
/// standard grid, plus a fixed Gauss-Legendre node cache for fast Laplace
/// transforms. Immutable after construction; char_fn is reentrant.
class KernelSet {
  public:
    KernelSet(const ModelSpec& spec, const EquilibriumPoint& at, double max_omega = 64.0);

    const TabulatedFn& psi(int k) const { return psi_[k]; }  // k = 0..3 for Psi1..Psi4
    const EquilibriumPoint& at() const { return at_; }
    double a_dagger() const { return a_dagger_; }

    /// Laplace transform of Psi_{k+1} at lambda (finite support, entire).
    Complex transform(int k, Complex lambda) const;
    /// Psi(lambda) = (1 - P1)(1 - P4) - P2 P3.
    Complex char_fn(Complex lambda) const;
    /// Scale for relative residual tests: 1 + |1-P1| + |1-P4| + |P2 P3|.
    double char_scale(Complex lambda) const;
    /// M_k(x) = int e^{-x a} |Psi_{k+1}(a)| da (decreasing in x).
    double abs_bound(int k, double x) const;
    /// x with (1-M1)(1-M4) > M2 M3 and M1, M4 < 1: no roots have Re >= x.
    double right_bound() const;

  private:
    TabulatedFn psi_[4];
    EquilibriumPoint at_;
    double a_dagger_ = 0.0;
    // cached transform nodes: ascending positions and w_i * Psi_k(a_i)
    std::vector<double> nodes_;
    std::vector<double> wpsi_[4];
    double cached_omega_ = 0.0;
};

KernelSet build_kernels(const ModelSpec& spec, const EquilibriumPoint& at);

struct RegionBox {
    double zeta_lo, zeta_hi, omega_lo, omega_hi;
    double width() const { return zeta_hi - zeta_lo; }
    double height() const { return omega_hi - omega_lo; }
};

struct RootRecord {
    Complex lambda;
    double residual;  // |Psi(lambda)| / char_scale
};

struct BoxCount {
    RegionBox box;
    int count;
};

struct SpectrumResult {
    std::vector<RootRecord> roots;  // sorted by (Re, Im)
    RegionBox region;
    std::optional<Complex> rightmost;
    std::vector<BoxCount> winding_counts;
    bool complete = true;  // false when max_roots was hit
};

struct RootFindOptions {
    double newton_tol = 1e-10;
    int max_roots = 64;
    bool enforce_conjugates = true;
    double boundary_samples_per_unit = 2.0;  // >= a_dagger/1.5 keeps phase steps < pi
};

/// Argument-principle subdivision + Newton polish for an analytic function
/// over a rectangle. `fn` must be analytic on the closure of the region.
SpectrumResult find_roots_fn(const std::function<Complex(Complex)>& fn,
                             const std::function<double(Complex)>& scale, RegionBox region,
                             const RootFindOptions& opts);

/// Characteristic roots of the kernel set in `region`.
SpectrumResult find_roots(const KernelSet& kernels, RegionBox region, int max_roots = 64);

/// Rightmost characteristic root: marches unit-wide strips leftward from
/// max(2, right_bound) down to zeta = -10. nullopt = stable beyond window.
std::optional<Complex> rightmost_root(const KernelSet& kernels, double omega_max);

enum class StabilityVerdict { Stable, Unstable, Marginal };

struct DfeStability {
    std::optional<Complex> epidemic_factor_rightmost;    // real root of P4 = 1
    std::optional<Complex> demographic_factor_rightmost; // from 1 - P1 in the window
    StabilityVerdict verdict = StabilityVerdict::Stable;
    double r0e = 0.0;
};

DfeStability dfe_stability(const ModelSpec& spec, double alpha);

struct TauThreshold {
    int k;
    double omega;        // numeric solution near 2k+1
    double tau_numeric;  // from the quadrature solve
    double tau_closed;   // (1-4k^2)/3 even, (-4k^2-8k-3)/3 odd
};

/// Critical tau values where the demographic factor has imaginary roots,
/// computed both by quadrature solve and closed form (checked to 1e-8).
std::vector<TauThreshold> tau_thresholds(int k_max);

struct TransversalityReport {
    double W_star0 = 0.0;
    double H0 = 0.0;       // H(0, W*0)
    double H_alpha = 0.0;  // dH/dalpha at (0, W*0)
    double H_W = 0.0;      // dH/dW at (0, W*0)
    double W_star_prime0 = 0.0;
    double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E = 0.0, F = 0.0, G = 0.0, H = 0.0;
    double dF1_dalpha = 0.0, dF2_dalpha = 0.0;  // +5i sheet
    double dF1_dzeta = 0.0, dF2_dzeta = 0.0;
    double zeta_prime0 = 0.0;
};

/// The crossing-derivative computation at alpha = 0 for the specific model
/// (R0d = 6, beta = r = q = (3/2) sin 2a, mu = tan a, K = a,
/// Phi = max{1 - x/10, 0}); errors out on any other spec.
TransversalityReport transversality_at_zero(const ModelSpec& spec);

}  // namespace agesi
