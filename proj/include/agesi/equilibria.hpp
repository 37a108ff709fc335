#pragma once

#include <optional>
#include <vector>

#include "agesi/model.hpp"

namespace agesi {

enum class EquilibriumKind { DiseaseFree, Endemic };

struct EquilibriumPoint {
    double alpha = 0.0;
    EquilibriumKind kind = EquilibriumKind::DiseaseFree;
    double W_star = 0.0;
    double B_star = 0.0;
    double Q_star = 0.0;
    double R0e = 0.0;
    TabulatedFn S_profile;
    TabulatedFn I_profile;
    double phi_slope = 0.0;               // d phi / d W at W_star (numerical)
    bool outside_monotone_region = false;  // general Phi only: Q* past the sampled decrease
};

struct FGH {
    double F = 0.0;
    double G = 0.0;
    double H = 0.0;
};

/// Precomputed inner convolutions for one (spec, alpha, W):
///   JK(x) = int_0^x K(rho) e^{-W L(rho)} e^{-alpha (x-rho)} drho
///   J1(x) = int_0^x e^{-W L(rho)} e^{-alpha (x-rho)} drho
/// Both continue exactly off the panel grid; see ExpCumulative.
struct InnerConvolutions {
    InnerConvolutions(const ModelSpec& spec, double alpha, double W);
    ExpCumulative JK;
    ExpCumulative J1;
    double alpha;
    double W;
};

/// F, G, H of the scalar endemic system, via the integrated-by-parts forms.
FGH eval_FGH(const ModelSpec& spec, double alpha, double W);

/// Fixed-alpha evaluator for fast W sweeps: the inner convolutions are
/// accumulated by a stable recurrence along precomputed quadrature stations,
/// so one eval costs a few thousand exponentials regardless of alpha.
class FGHEvaluator {
  public:
    FGHEvaluator(const ModelSpec& spec, double alpha);
    FGH eval(double W) const;
    double phi(double W) const;
    double alpha() const { return alpha_; }

  private:
    struct Station {
        double decay;                   // e^{-alpha (s_i - s_{i-1})}
        double cK[8], c1[8], L[8];      // inner GL nodes over (s_{i-1}, s_i]
        double w_beta_pi, w_r_pi, w_q_pi;  // outer weights at s_i (0 on edges)
        double Ls;                      // L(s_i)
    };
    std::vector<Station> stations_;
    double alpha_ = 0.0;
    double r0d_ = 0.0;
    const ModelSpec* spec_ = nullptr;
};

/// phi(alpha, W) = R0d * Phi(G/H) * F. Throws NumericalError when H == 0
/// (degenerate model: K*q identically zero).
double eval_phi(const ModelSpec& spec, double alpha, double W);

/// R0e = N*(0) * H(alpha, 0), cross-checked against the next-generation
/// double integral.
double epidemic_reproduction(const ModelSpec& spec, double alpha);

/// Full reconstruction at a solved W* (pre: |phi - 1| <= root_tol, or W* = 0
/// for the disease-free point).
EquilibriumPoint reconstruct_equilibrium(const ModelSpec& spec, double alpha, double W_star);

/// All W in (0, w_scan_max] with phi(alpha, W) = 1, ascending; each point
/// fully reconstructed. Sign-change scan at w_scan_points then bisection.
std::vector<EquilibriumPoint> find_endemic(const ModelSpec& spec, double alpha);

/// Cheap variant: the sorted W* roots only, no profile reconstruction.
std::vector<double> find_endemic_W(const ModelSpec& spec, double alpha);

struct UniquenessReport {
    bool holds = false;
    double worst_violation = 0.0;  // signed margin, negative = violated
    double rho1 = 0.0, rho2 = 0.0;
};

/// Grid check of the Hadeler-Dietz style hypothesis on the (rho1 <= rho2)
/// triangle. Margin is RHS - LHS of the inequality, normalized.
UniquenessReport check_uniqueness_condition(const ModelSpec& spec, double alpha, int grid_n);

}  // namespace agesi
