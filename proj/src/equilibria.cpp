#include "agesi/equilibria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace agesi {

InnerConvolutions::InnerConvolutions(const ModelSpec& spec, double alpha_, double W_)
    : alpha(alpha_), W(W_) {
    auto fk = [&spec, W_](double rho) {
        return spec.K()(rho) * std::exp(-W_ * spec.cumulative_contagion(rho));
    };
    auto f1 = [&spec, W_](double rho) {
        return std::exp(-W_ * spec.cumulative_contagion(rho));
    };
    JK = ExpCumulative(fk, alpha_, spec.panel_edges());
    J1 = ExpCumulative(f1, alpha_, spec.panel_edges());
}

FGHEvaluator::FGHEvaluator(const ModelSpec& spec, double alpha)
    : alpha_(alpha), r0d_(spec.r0d()), spec_(&spec) {
    const auto& edges = spec.panel_edges();
    // station positions: the outer GL nodes plus every panel edge (weight 0),
    // so no recurrence interval straddles a kernel breakpoint
    std::vector<double> pos;
    std::vector<std::array<double, 3>> wts;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double c = 0.5 * (edges[e + 1] + edges[e]);
        const double h = 0.5 * (edges[e + 1] - edges[e]);
        for (int j = 0; j < GaussLegendre8::n; ++j) {
            const double s = c + h * GaussLegendre8::node[j];
            const double w = h * GaussLegendre8::weight[j];
            const double pi_s = spec.survival(s);
            pos.push_back(s);
            wts.push_back({w * spec.beta()(s) * pi_s, w * spec.r()(s) * pi_s,
                           w * spec.q()(s) * pi_s});
        }
        pos.push_back(edges[e + 1]);
        wts.push_back({0.0, 0.0, 0.0});
    }
    stations_.reserve(pos.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        Station st;
        const double lo = prev, hi = pos[i];
        st.decay = std::exp(-alpha * (hi - lo));
        const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
        for (int j = 0; j < GaussLegendre8::n; ++j) {
            const double rho = c + h * GaussLegendre8::node[j];
            const double w = h * GaussLegendre8::weight[j];
            const double e = std::exp(-alpha * (hi - rho));
            st.cK[j] = w * spec.K()(rho) * e;
            st.c1[j] = w * e;
            st.L[j] = spec.cumulative_contagion(rho);
        }
        st.w_beta_pi = wts[i][0];
        st.w_r_pi = wts[i][1];
        st.w_q_pi = wts[i][2];
        st.Ls = spec.cumulative_contagion(hi);
        stations_.push_back(st);
        prev = hi;
    }
}

FGH FGHEvaluator::eval(double W) const {
    if (W < 0.0) throw std::invalid_argument("FGHEvaluator: W must be nonnegative");
    double JK = 0.0, J1 = 0.0;
    FGH out;
    for (const Station& st : stations_) {
        double dK = 0.0, d1 = 0.0;
        for (int j = 0; j < GaussLegendre8::n; ++j) {
            const double g = std::exp(-W * st.L[j]);
            dK += st.cK[j] * g;
            d1 += st.c1[j] * g;
        }
        JK = st.decay * JK + dK;
        J1 = st.decay * J1 + d1;
        if (st.w_beta_pi != 0.0 || st.w_r_pi != 0.0 || st.w_q_pi != 0.0) {
            const double bracket = std::exp(-W * st.Ls) + W * JK;
            out.F += st.w_beta_pi * bracket;
            out.G += st.w_r_pi * bracket;
            out.H += st.w_q_pi * JK;
        }
    }
    return out;
}

double FGHEvaluator::phi(double W) const {
    const FGH v = eval(W);
    if (!(v.H > 0.0))
        throw NumericalError("degenerate model: H(alpha,W) = 0 (no transmission path, K*q == 0)");
    return r0d_ * spec_->phi_density()(v.G / v.H) * v.F;
}

FGH eval_FGH(const ModelSpec& spec, double alpha, double W) {
    if (W < 0.0) throw std::invalid_argument("eval_FGH: W must be nonnegative");
    return FGHEvaluator(spec, alpha).eval(W);
}

double eval_phi(const ModelSpec& spec, double alpha, double W) {
    return FGHEvaluator(spec, alpha).phi(W);
}

double epidemic_reproduction(const ModelSpec& spec, double alpha) {
    const FGH v = eval_FGH(spec, alpha, 0.0);
    const double r0e = spec.demographic_equilibrium().B_dfe * v.H;

    // cross-check against the next-generation double integral
    const auto& edges = spec.panel_edges();
    const double direct = integrate_edges(
        [&](double a) {
            const double inner = integrate(
                [&](double s) {
                    return spec.q()(s) * spec.survival_ratio(a, s) * std::exp(-alpha * (s - a));
                },
                a, spec.a_dagger(), 32, spec.k_breakpoints());
            return spec.K()(a) * spec.demographic_equilibrium().N_star(a) * inner;
        },
        edges);
    if (std::abs(direct - r0e) > 1e-6 * std::max(1.0, std::abs(r0e)))
        throw NumericalError("R0e cross-check failed: product form and next-generation "
                             "integral disagree beyond 1e-6");
    return r0e;
}

namespace {

double phi_slope_at(const ModelSpec& spec, double alpha, double W) {
    const double h = 1e-4 * std::max(1.0, W);
    const double lo = std::max(0.0, W - h);
    return (eval_phi(spec, alpha, W + h) - eval_phi(spec, alpha, lo)) / (W + h - lo);
}

}  // namespace

EquilibriumPoint reconstruct_equilibrium(const ModelSpec& spec, double alpha, double W_star) {
    EquilibriumPoint pt;
    pt.alpha = alpha;
    pt.W_star = W_star;
    pt.R0e = spec.demographic_equilibrium().B_dfe * eval_FGH(spec, alpha, 0.0).H;

    const auto& grid = spec.grid();
    if (W_star == 0.0) {
        pt.kind = EquilibriumKind::DiseaseFree;
        pt.B_star = spec.demographic_equilibrium().B_dfe;
        pt.Q_star = spec.demographic_equilibrium().Q_d_star;
        pt.S_profile = spec.demographic_equilibrium().N_star;
        std::vector<double> zero(grid.size(), 0.0);
        pt.I_profile = TabulatedFn(grid, zero);
        pt.phi_slope = phi_slope_at(spec, alpha, 0.0);
        return pt;
    }

    const FGH v = eval_FGH(spec, alpha, W_star);
    if (!(v.H > 0.0)) throw NumericalError("degenerate model: H = 0 at endemic reconstruction");
    pt.kind = EquilibriumKind::Endemic;
    pt.B_star = 1.0 / v.H;
    pt.Q_star = v.G / v.H;
    pt.phi_slope = phi_slope_at(spec, alpha, W_star);

    InnerConvolutions inner(spec, alpha, W_star);
    std::vector<double> sv(grid.size()), iv(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid[i];
        const double pia = spec.survival(a);
        sv[i] = pt.B_star * std::exp(-W_star * spec.cumulative_contagion(a)) * pia;
        iv[i] = pt.B_star * W_star * pia * inner.JK.eval(a);
    }
    pt.S_profile = TabulatedFn(grid, sv);
    pt.I_profile = TabulatedFn(grid, iv);

    if (!spec.phi_density().is_linear_capped()) {
        // flag roots past the sampled decreasing stretch of a general Phi
        const double h = 1e-5 * std::max(1.0, pt.Q_star);
        const double slope =
            (spec.phi_density()(pt.Q_star + h) - spec.phi_density()(pt.Q_star - h)) / (2 * h);
        pt.outside_monotone_region = slope >= 0.0;
    }
    return pt;
}

std::vector<double> find_endemic_W(const ModelSpec& spec, double alpha) {
    const auto& opt = spec.numerics();
    const int n = opt.w_scan_points;
    std::vector<double> roots;

    const FGHEvaluator ev(spec, alpha);
    auto phi1 = [&](double w) { return ev.phi(w) - 1.0; };
    double w_prev = opt.w_scan_max / n * 1e-6;  // just off zero: endemic means W > 0
    double f_prev = phi1(w_prev);
    for (int i = 1; i <= n; ++i) {
        const double w = opt.w_scan_max * static_cast<double>(i) / n;
        const double f = phi1(w);
        if (f_prev == 0.0) {
            roots.push_back(w_prev);
        } else if (f_prev * f < 0.0) {
            double lo = w_prev, hi = w, flo = f_prev;
            while (hi - lo > opt.root_tol * std::max(1.0, hi)) {
                const double mid = 0.5 * (lo + hi);
                const double fm = phi1(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (flo * fm < 0.0) hi = mid;
                else { lo = mid; flo = fm; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        w_prev = w;
        f_prev = f;
    }
    // Phi clipped to 0 makes phi = 0 there: such W cannot satisfy phi = 1,
    // and bisection cannot land on them (phi1 = -1), so nothing to reject.
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<EquilibriumPoint> find_endemic(const ModelSpec& spec, double alpha) {
    std::vector<EquilibriumPoint> out;
    for (double w : find_endemic_W(spec, alpha))
        out.push_back(reconstruct_equilibrium(spec, alpha, w));
    return out;
}

UniquenessReport check_uniqueness_condition(const ModelSpec& spec, double alpha, int grid_n) {
    if (grid_n < 2) throw std::invalid_argument("check_uniqueness_condition: grid_n >= 2");
    const double ad = spec.a_dagger();

    // tail integrals T_q(rho) = int_rho^{ad} q pi e^{-alpha s} ds (same for r)
    auto tail = [&](const RateFn& w) {
        std::vector<double> t(static_cast<std::size_t>(grid_n) + 1, 0.0);
        for (int i = grid_n - 1; i >= 0; --i) {
            const double lo = ad * i / grid_n, hi = ad * (i + 1) / grid_n;
            t[static_cast<std::size_t>(i)] =
                t[static_cast<std::size_t>(i) + 1] +
                integrate([&](double s) { return w(s) * spec.survival(s) * std::exp(-alpha * s); },
                          lo, hi, 4, spec.k_breakpoints());
        }
        return t;
    };
    const auto Tq = tail(spec.q());
    const auto Tr = tail(spec.r());

    UniquenessReport rep;
    rep.holds = true;
    rep.worst_violation = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid_n; ++i) {
        const double rho1 = ad * i / grid_n;
        const double k1 = spec.K()(rho1);
        for (int j = i; j <= grid_n; ++j) {
            const double rho2 = ad * j / grid_n;
            const double k2 = spec.K()(rho2);
            const double lhs = k1 * Tq[static_cast<std::size_t>(i)] * Tr[static_cast<std::size_t>(j)];
            const double rhs = k2 * Tr[static_cast<std::size_t>(i)] * Tq[static_cast<std::size_t>(j)];
            const double margin = rhs - lhs;
            if (margin < rep.worst_violation) {
                rep.worst_violation = margin;
                rep.rho1 = rho1;
                rep.rho2 = rho2;
            }
        }
    }
    rep.holds = rep.worst_violation >= -1e-12;
    return rep;
}

}  // namespace agesi
