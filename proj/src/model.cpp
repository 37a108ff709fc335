#include "agesi/model.hpp"

#include <cmath>
#include <sstream>

namespace agesi {

ModelSpec::ModelSpec(double a_dagger, double r0d, double alpha, RateFn beta, RateFn mu, RateFn r,
                     RateFn q, RateFn K, DensityDependence phi, NumericOptions numerics)
    : a_dagger_(a_dagger),
      r0d_(r0d),
      alpha_(alpha),
      beta_(std::move(beta)),
      mu_(std::move(mu)),
      r_(std::move(r)),
      q_(std::move(q)),
      K_(std::move(K)),
      phi_(std::move(phi)),
      numerics_(numerics) {
    validate();
    build_derived();
}

ModelSpec ModelSpec::with_alpha(double alpha) const {
    ModelSpec copy = *this;
    copy.alpha_ = alpha;
    return copy;
}

void ModelSpec::validate() {
    if (!(a_dagger_ > 0.0)) throw ValidationError("a_dagger must be positive");
    if (!(r0d_ > 1.0)) throw ValidationError("R0d must exceed 1");
    if (alpha_ < 0.0) throw ValidationError("alpha must be nonnegative");

    const int n = 1000;
    for (int i = 0; i <= n; ++i) {
        const double a = a_dagger_ * i / n;
        for (const auto& [fn, name] : std::initializer_list<std::pair<const RateFn*, const char*>>{
                 {&beta_, "beta"}, {&r_, "r"}, {&q_, "q"}, {&K_, "K"}}) {
            const double v = (*fn)(a);
            if (!std::isfinite(v)) {
                std::ostringstream os;
                os << name << " is non-finite at a=" << a;
                throw ValidationError(os.str());
            }
            if (v < 0.0) {
                std::ostringstream os;
                os << name << " is negative at a=" << a;
                throw ValidationError(os.str());
            }
        }
        const double m = mu_(a);
        if (i < n && !std::isfinite(m)) {
            std::ostringstream os;
            os << "mu is non-finite at a=" << a << " (only allowed at a_dagger)";
            throw ValidationError(os.str());
        }
        if (std::isfinite(m) && m < 0.0) {
            std::ostringstream os;
            os << "mu is negative at a=" << a;
            throw ValidationError(os.str());
        }
    }
    for (const RateFn* fn : {&beta_, &mu_, &r_, &q_, &K_})
        if (fn->piecewise()) fn->pieces().validate_cover(a_dagger_);
    phi_.validate(3.0 * std::max(1.0, phi_.is_linear_capped() ? phi_.ceiling() : 1.0));
}

void ModelSpec::build_derived() {
    k_breaks_ = K_.breakpoints();
    const int panels = numerics_.panels(a_dagger_);
    edges_ = make_panel_edges(0.0, a_dagger_, panels, k_breaks_);

    grid_.resize(numerics_.grid_nodes);
    for (std::size_t i = 0; i < grid_.size(); ++i)
        grid_[i] = a_dagger_ * static_cast<double>(i) / static_cast<double>(grid_.size() - 1);

    // mu may blow up near a_dagger: use a fine grid with the last panels
    // subdivided; pi ratios absorb the cap downstream.
    std::vector<double> mu_breaks = mu_.breakpoints();
    auto mu_edges = make_panel_edges(0.0, a_dagger_, std::max(1024, panels), mu_breaks);
    auto mu_clamped = [this](double a) {
        const double v = mu_(a);
        if (!std::isfinite(v)) return 1e300;  // integrable only through the cap
        return v;
    };
    mu_cum_ = CumulativeIntegral(mu_clamped, mu_edges);
    k_cum_ = CumulativeIntegral([this](double a) { return K_(a); },
                                make_panel_edges(0.0, a_dagger_, panels, k_breaks_));

    int_r_pi_ = integrate_edges([this](double a) { return r_(a) * survival(a); }, edges_);
    int_beta_pi_ = integrate_edges([this](double a) { return beta_(a) * survival(a); }, edges_);

    if (std::abs(int_beta_pi_ - 1.0) > numerics_.norm_tol) {
        std::ostringstream os;
        os.precision(12);
        os << "birth normalization violated: int beta*pi = " << int_beta_pi_
           << " (|deviation| > " << numerics_.norm_tol << ")";
        throw ValidationError(os.str());
    }
    demographic_ = solve_demographic();
}

double ModelSpec::survival(double a) const {
    if (a <= 0.0) return 1.0;
    if (a >= a_dagger_) return 0.0;
    const double m = mu_cum_.eval(a);
    if (m >= kSurvivalExpCap) return 0.0;
    return std::exp(-m);
}

double ModelSpec::survival_ratio(double a1, double a2) const {
    if (a2 >= a_dagger_) return 0.0;
    if (a2 <= a1) return 1.0;
    const double dm = mu_cum_.eval(a2) - mu_cum_.eval(a1);
    if (dm >= kSurvivalExpCap) return 0.0;
    return std::exp(-dm);
}

double ModelSpec::cumulative_contagion(double a) const {
    if (a <= 0.0) return 0.0;
    if (a >= a_dagger_) return k_cum_.eval(a_dagger_);
    return k_cum_.eval(a);
}

ModelSpec::Demographic ModelSpec::solve_demographic() const {
    const double target = 1.0 / r0d_;
    auto g = [this](double x) { return phi_(x); };  // decreasing until plateau

    // bracket: expand x until Phi(x) < 1/R0d; stop on a plateau
    double lo = 0.0, hi = phi_.is_linear_capped() ? phi_.ceiling() : 1.0;
    double scanned_min = g(0.0);
    int guard = 0;
    while (g(hi) >= target) {
        const double prev = g(hi);
        hi *= 2.0;
        scanned_min = std::min(scanned_min, g(hi));
        if (++guard > 60 || (std::abs(g(hi) - prev) < 1e-12 && g(hi) >= target)) {
            std::ostringstream os;
            os.precision(12);
            os << "no Q_d with R0d*Phi(Q_d)=1: Phi scanned down to " << scanned_min
               << " on [0," << hi << "], needs " << target;
            throw NumericalError(os.str());
        }
    }
    // bisection on Phi(x) - 1/R0d (Phi non-increasing); leftmost root
    for (int it = 0; it < 200 && hi - lo > numerics_.root_tol * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > target) lo = mid;
        else hi = mid;
    }
    // prefer the left edge of any flat stretch at the target value
    double qd = 0.5 * (lo + hi);
    if (std::abs(r0d_ * g(lo) - 1.0) < std::abs(r0d_ * g(qd) - 1.0)) qd = lo;

    Demographic d;
    d.Q_d_star = qd;
    std::vector<double> vals(grid_.size());
    const double denom = int_r_pi_;
    if (!(denom > 0.0)) throw NumericalError("int r*pi vanishes; N* undefined");
    for (std::size_t i = 0; i < grid_.size(); ++i)
        vals[i] = qd * survival(grid_[i]) / denom;
    d.N_star = TabulatedFn(grid_, vals);
    d.B_dfe = qd / denom;
    return d;
}

}  // namespace agesi
