#pragma once

#include <memory>
#include <string>
#include <vector>

#include "agesi/ratefn.hpp"
#include "agesi/quadrature.hpp"
#include "agesi/tabulated.hpp"

namespace agesi {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericOptions {
    double quad_points = 40.0;   // quadrature panels per unit age
    double norm_tol = 1e-6;      // birth normalization tolerance
    double root_tol = 1e-10;     // scalar root tolerance
    double w_scan_max = 100.0;   // endemic scan upper bound
    int w_scan_points = 2000;    // endemic scan resolution
    double newton_tol = 1e-10;   // relative residual for polished roots
    double zeta_lo = -10.0;      // default spectrum region
    double zeta_hi = 2.0;
    double omega_max = 40.0;
    double stability_tol = 1e-6;
    std::size_t grid_nodes = 1025;  // tabulation grid
    int threads = 1;

    int panels(double a_dagger) const {
        return std::max(64, static_cast<int>(std::ceil(quad_points * a_dagger)));
    }
};

/// One validated model instance plus cached demographic quantities.
/// Immutable after construction; all evaluation methods are const and
/// safe for concurrent use.
class ModelSpec {
  public:
    ModelSpec(double a_dagger, double r0d, double alpha, RateFn beta, RateFn mu, RateFn r,
              RateFn q, RateFn K, DensityDependence phi, NumericOptions numerics = {});

    double a_dagger() const { return a_dagger_; }
    double r0d() const { return r0d_; }
    double alpha() const { return alpha_; }
    const NumericOptions& numerics() const { return numerics_; }

    const RateFn& beta() const { return beta_; }
    const RateFn& mu() const { return mu_; }
    const RateFn& r() const { return r_; }
    const RateFn& q() const { return q_; }
    const RateFn& K() const { return K_; }
    const DensityDependence& phi_density() const { return phi_; }

    /// pi(a) = exp(-int_0^a mu); exactly 0 at a_dagger and beyond.
    double survival(double a) const;
    /// pi(a2)/pi(a1) for 0 <= a1 <= a2, via the cumulative of mu.
    double survival_ratio(double a1, double a2) const;
    /// L(a) = int_0^a K.
    double cumulative_contagion(double a) const;

    /// int_0^{a_dagger} r pi (cached).
    double int_r_pi() const { return int_r_pi_; }
    double int_beta_pi() const { return int_beta_pi_; }

    struct Demographic {
        double Q_d_star;
        TabulatedFn N_star;
        double B_dfe;  // N*(0)
    };
    const Demographic& demographic_equilibrium() const { return demographic_; }

    /// Panel edges over [0, a_dagger] aligned to K's breakpoints.
    const std::vector<double>& panel_edges() const { return edges_; }
    const std::vector<double>& k_breakpoints() const { return k_breaks_; }
    /// Uniform tabulation nodes (numerics.grid_nodes of them).
    const std::vector<double>& grid() const { return grid_; }

    /// Returns a copy with a different alpha (shares no mutable state).
    ModelSpec with_alpha(double alpha) const;

  private:
    void validate();
    void build_derived();
    Demographic solve_demographic() const;

    double a_dagger_, r0d_, alpha_;
    RateFn beta_, mu_, r_, q_, K_;
    DensityDependence phi_;
    NumericOptions numerics_;

    std::vector<double> edges_;
    std::vector<double> k_breaks_;
    std::vector<double> grid_;
    CumulativeIntegral mu_cum_;  // int_0^a mu, capped downstream
    CumulativeIntegral k_cum_;   // L(a)
    double int_r_pi_ = 0.0;
    double int_beta_pi_ = 0.0;
    Demographic demographic_;
};

/// Survival exponent cap: beyond this, pi := 0 (mu may diverge at a_dagger).
inline constexpr double kSurvivalExpCap = 700.0;

}  // namespace agesi
