#pragma once

#include "agesi/spectrum.hpp"

namespace agesi {

enum class BifurcationKind { Transcritical, Fold, Hopf };

struct Bifurcation {
    BifurcationKind kind;
    double alpha = 0.0;
    double W_star = 0.0;
    double omega = 0.0;  // Hopf crossing frequency, 0 otherwise
};

struct BranchPoint {
    double alpha = 0.0;
    double W_star = 0.0;
    bool stable = false;
    bool marginal = false;  // |Re rightmost| <= stability_tol
    Complex rightmost{0.0, 0.0};
    bool has_rightmost = false;  // false: no root found above the search floor
    EquilibriumKind kind = EquilibriumKind::Endemic;
};

struct Branch {
    std::vector<BranchPoint> points;  // ordered along the curve
    std::vector<Bifurcation> bifurcations;
};

struct TraceOptions {
    double omega_max = 40.0;     // spectrum window for per-point stability
    bool classify = true;        // rightmost-root per point (the expensive part)
    double fold_refine_tol = 1e-4;
    double hopf_refine_tol = 1e-4;
};

/// Equilibrium branches over [alpha_lo, alpha_hi] at the given step: the
/// disease-free branch plus endemic branches linked across the alpha grid,
/// with stability flags and detected bifurcations attached.
std::vector<Branch> trace_diagram(const ModelSpec& spec, double alpha_lo, double alpha_hi,
                                  double step, const TraceOptions& opts = {});

/// R0e(alpha) = 1 crossing, bisected to 1e-6; nullopt when R0e - 1 does not
/// change sign over the interval.
std::optional<double> detect_transcritical(const ModelSpec& spec, double alpha_lo,
                                           double alpha_hi);

/// Hopf points on a traced branch: sign changes of the rightmost complex
/// pair's real part, refined in alpha; omega is the crossing frequency.
std::vector<Bifurcation> detect_hopf(const ModelSpec& spec, const Branch& branch,
                                     double refine_tol = 1e-4);

/// Folds: turning points of alpha along the branch, refined by bisection on
/// local root-pair existence. Endpoint folds at the grid boundary are not
/// refined (flagged as-is).
std::vector<Bifurcation> detect_fold(const ModelSpec& spec, const Branch& branch,
                                     double refine_tol = 1e-4);

}  // namespace agesi
