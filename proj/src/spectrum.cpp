#include "agesi/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace agesi {

namespace {

constexpr double kPi = 3.14159265358979323846;

TabulatedFn fine_table(const ModelSpec& spec, std::size_t n,
                       const std::function<double(double)>& f) {
    const double ad = spec.a_dagger();
    std::vector<double> nodes(n), vals(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i] = ad * static_cast<double>(i) / static_cast<double>(n - 1);
        vals[i] = f(nodes[i]);
    }
    return TabulatedFn(std::move(nodes), std::move(vals));
}

}  // namespace

KernelSet build_kernels(const ModelSpec& spec, const EquilibriumPoint& at) {
    return KernelSet(spec, at);
}

KernelSet::KernelSet(const ModelSpec& spec, const EquilibriumPoint& at, double max_omega)
    : at_(at), a_dagger_(spec.a_dagger()) {
    const double alpha = at.alpha;
    const double W = at.W_star;
    const double B = at.B_star;
    const double Q = at.Q_star;
    const auto& phi = spec.phi_density();

    if (phi.is_linear_capped() &&
        std::abs(Q - phi.ceiling()) < 1e-9 * std::max(1.0, phi.ceiling()))
        throw NumericalError("nondifferentiable density dependence at equilibrium "
                             "(Q* at the cap of the linear-capped Phi)");
    const double phiQ = phi(Q);
    const double dphiQ = phi.derivative(Q);
    if (!(phiQ > 0.0))
        throw NumericalError("Phi(Q*) = 0 at equilibrium; linearization undefined");

    InnerConvolutions inner(spec, alpha, W);

    // dense caches; tails below interpolate these instead of re-integrating
    const std::size_t nf = 4097;
    auto gfun = [&](double s) {
        return (spec.r0d() * phiQ * spec.beta()(s) + B * (dphiQ / phiQ) * spec.r()(s)) *
               spec.survival(s);
    };
    TabulatedFn gpi = fine_table(spec, nf, gfun);
    TabulatedFn qpi = fine_table(
        spec, nf, [&](double s) { return spec.q()(s) * spec.survival(s); });
    TabulatedFn Ltab = fine_table(
        spec, nf, [&](double s) { return spec.cumulative_contagion(s); });
    TabulatedFn J1 = fine_table(spec, nf, [&](double s) { return inner.J1.eval(s); });
    TabulatedFn JK = fine_table(spec, nf, [&](double s) { return inner.JK.eval(s); });

    const auto& grid = spec.grid();
    const auto& bp = spec.k_breakpoints();
    std::vector<double> p1(grid.size()), p2(grid.size()), p3(grid.size()), p4(grid.size());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double a = grid[i];
        const double bracket = std::exp(-W * Ltab(a)) + W * JK(a);
        p1[i] = gfun(a) * bracket;
        p3[i] = W * qpi(a) * JK(a);
        if (a >= a_dagger_ - 1e-14 * a_dagger_) {
            p2[i] = 0.0;
            p4[i] = 0.0;
            continue;
        }
        std::vector<double> tail_bp = bp;
        for (double b : bp) tail_bp.push_back(a + b);
        const auto edges = make_panel_edges(a, a_dagger_, 48, tail_bp);
        const double eaa = std::exp(-alpha * a);
        p4[i] = B * integrate_edges(
                        [&](double s) {
                            const double ks = spec.K()(s - a);
                            if (ks == 0.0) return 0.0;
                            const double br = eaa * std::exp(-W * Ltab(s - a)) -
                                              W * (JK(s) - eaa * JK(s - a));
                            return qpi(s) * ks * br;
                        },
                        edges);
        p2[i] = (alpha == 0.0)
                    ? 0.0
                    : -alpha * B *
                          integrate_edges(
                              [&](double s) {
                                  const double ks = spec.K()(s - a);
                                  if (ks == 0.0) return 0.0;
                                  return gpi(s) * ks * (J1(s) - eaa * J1(s - a));
                              },
                              edges);
    }
    psi_[0] = TabulatedFn(grid, p1);
    psi_[1] = TabulatedFn(grid, p2);
    psi_[2] = TabulatedFn(grid, p3);
    psi_[3] = TabulatedFn(grid, p4);

    // transform node cache
    cached_omega_ = std::max(max_omega, 2.0 * spec.numerics().omega_max);
    const int panels = std::max(128, static_cast<int>(std::ceil(cached_omega_ * a_dagger_ / 2.0)));
    const auto edges = make_panel_edges(0.0, a_dagger_, panels, spec.k_breakpoints());
    nodes_.reserve(static_cast<std::size_t>(panels) * GaussLegendre8::n);
    for (int k = 0; k < 4; ++k) wpsi_[k].reserve(nodes_.capacity());
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double c = 0.5 * (edges[e + 1] + edges[e]);
        const double h = 0.5 * (edges[e + 1] - edges[e]);
        for (int j = 0; j < GaussLegendre8::n; ++j) {
            const double x = c + h * GaussLegendre8::node[j];
            const double w = h * GaussLegendre8::weight[j];
            nodes_.push_back(x);
            for (int k = 0; k < 4; ++k) wpsi_[k].push_back(w * psi_[k](x));
        }
    }
}

Complex KernelSet::transform(int k, Complex lambda) const {
    if (std::abs(lambda.imag()) <= cached_omega_) {
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            s += wpsi_[k][i] * std::exp(-lambda * nodes_[i]);
        return s;
    }
    // rare slow path: oscillation-aware panel count
    const int panels =
        std::max(128, static_cast<int>(std::ceil(std::abs(lambda.imag()) * a_dagger_ / 2.0)));
    const auto edges = make_panel_edges(0.0, a_dagger_, panels);
    Complex s{0.0, 0.0};
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double c = 0.5 * (edges[e + 1] + edges[e]);
        const double h = 0.5 * (edges[e + 1] - edges[e]);
        for (int j = 0; j < GaussLegendre8::n; ++j) {
            const double x = c + h * GaussLegendre8::node[j];
            s += h * GaussLegendre8::weight[j] * psi_[k](x) * std::exp(-lambda * x);
        }
    }
    return s;
}

Complex KernelSet::char_fn(Complex lambda) const {
    // one pass over the node cache serves all four transforms
    if (std::abs(lambda.imag()) <= cached_omega_) {
        Complex t[4] = {};
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            const Complex e = std::exp(-lambda * nodes_[i]);
            t[0] += wpsi_[0][i] * e;
            t[1] += wpsi_[1][i] * e;
            t[2] += wpsi_[2][i] * e;
            t[3] += wpsi_[3][i] * e;
        }
        return (1.0 - t[0]) * (1.0 - t[3]) - t[1] * t[2];
    }
    return (1.0 - transform(0, lambda)) * (1.0 - transform(3, lambda)) -
           transform(1, lambda) * transform(2, lambda);
}

double KernelSet::char_scale(Complex lambda) const {
    const Complex t1 = transform(0, lambda), t2 = transform(1, lambda),
                  t3 = transform(2, lambda), t4 = transform(3, lambda);
    return 1.0 + std::abs(1.0 - t1) + std::abs(1.0 - t4) + std::abs(t2 * t3);
}

double KernelSet::abs_bound(int k, double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        s += std::abs(wpsi_[k][i]) * std::exp(-x * nodes_[i]);
    return s;
}

double KernelSet::right_bound() const {
    for (double x = 2.0; x <= 4096.0; x *= 2.0) {
        const double m1 = abs_bound(0, x), m2 = abs_bound(1, x), m3 = abs_bound(2, x),
                     m4 = abs_bound(3, x);
        if (m1 < 1.0 && m4 < 1.0 && (1.0 - m1) * (1.0 - m4) > m2 * m3) return x;
    }
    throw NumericalError("no finite right bound for the characteristic roots");
}

// ---------------------------------------------------------------------------
// argument-principle machinery

namespace {

struct WindingStatus {
    bool ok = true;        // false: boundary too close to a zero
    double total = 0.0;    // accumulated phase
};

void walk_segment(const std::function<Complex(Complex)>& fn, Complex z0, Complex f0, Complex z1,
                  Complex f1, double zero_tol, int depth, WindingStatus& st) {
    if (!st.ok) return;
    if (std::abs(f0) < zero_tol || std::abs(f1) < zero_tol) {
        st.ok = false;
        return;
    }
    const double dphi = std::arg(f1 / f0);
    if (std::abs(dphi) <= kPi / 2.0) {
        st.total += dphi;
        return;
    }
    if (depth >= 30) {
        st.ok = false;
        return;
    }
    const Complex zm = 0.5 * (z0 + z1);
    const Complex fm = fn(zm);
    walk_segment(fn, z0, f0, zm, fm, zero_tol, depth + 1, st);
    walk_segment(fn, zm, fm, z1, f1, zero_tol, depth + 1, st);
}

/// Winding number of fn over the box boundary; nullopt if a boundary sample
/// came too close to a zero (caller jitters and retries).
std::optional<int> winding_number(const std::function<Complex(Complex)>& fn,
                                  const std::function<double(Complex)>& scale,
                                  const RegionBox& b, double osc_per_unit) {
    const Complex corners[5] = {{b.zeta_lo, b.omega_lo},
                                {b.zeta_hi, b.omega_lo},
                                {b.zeta_hi, b.omega_hi},
                                {b.zeta_lo, b.omega_hi},
                                {b.zeta_lo, b.omega_lo}};
    WindingStatus st;
    for (int e = 0; e < 4 && st.ok; ++e) {
        const Complex z0 = corners[e], z1 = corners[e + 1];
        const double zero_tol = 1e-12 * scale(0.5 * (z0 + z1));
        // initial spacing keeps any true phase step below pi (no hidden wraps)
        const int n0 = std::max(4, static_cast<int>(std::ceil(std::abs(z1 - z0) * osc_per_unit)));
        Complex zp = z0, fp = fn(z0);
        for (int i = 1; i <= n0 && st.ok; ++i) {
            const Complex z = z0 + (z1 - z0) * (static_cast<double>(i) / n0);
            const Complex f = fn(z);
            walk_segment(fn, zp, fp, z, f, zero_tol, 0, st);
            zp = z;
            fp = f;
        }
    }
    if (!st.ok) return std::nullopt;
    const double k = st.total / (2.0 * kPi);
    const long rounded = std::lround(k);
    if (std::abs(k - static_cast<double>(rounded)) > 0.25) return std::nullopt;
    return static_cast<int>(rounded);
}

std::optional<Complex> newton_polish(const std::function<Complex(Complex)>& fn,
                                     const std::function<double(Complex)>& scale, Complex z,
                                     double tol) {
    for (int it = 0; it < 60; ++it) {
        const Complex f = fn(z);
        const double h = 1e-6 * (1.0 + std::abs(z));
        const Complex df = (fn(z + h) - fn(z - h)) / (2.0 * h);
        if (std::abs(df) == 0.0) return std::nullopt;
        const Complex step = f / df;
        z -= step;
        if (std::abs(z) > 1e6) return std::nullopt;
        if (std::abs(step) < 1e-13 * (1.0 + std::abs(z))) break;
    }
    if (std::abs(fn(z)) <= tol * scale(z)) return z;
    return std::nullopt;
}

bool in_box(Complex z, const RegionBox& b, double slack) {
    return z.real() >= b.zeta_lo - slack && z.real() <= b.zeta_hi + slack &&
           z.imag() >= b.omega_lo - slack && z.imag() <= b.omega_hi + slack;
}

}  // namespace

SpectrumResult find_roots_fn(const std::function<Complex(Complex)>& fn,
                             const std::function<double(Complex)>& scale, RegionBox region,
                             const RootFindOptions& opts) {
    SpectrumResult result;
    result.region = region;
    const double osc = opts.boundary_samples_per_unit;

    auto count_with_jitter = [&](RegionBox b) -> std::pair<RegionBox, int> {
        static const double jit[5] = {0.0, 3.1e-6, -2.3e-6, 6.7e-6, -7.9e-6};
        for (double j : jit) {
            RegionBox jb{b.zeta_lo - j, b.zeta_hi + j, b.omega_lo - j, b.omega_hi + j};
            if (auto n = winding_number(fn, scale, jb, osc)) return {jb, *n};
        }
        throw NumericalError("winding computation unstable: boundary near a root after 5 jitters");
    };

    std::deque<std::pair<RegionBox, int>> queue;
    queue.push_back(count_with_jitter(region));

    auto record_root = [&](Complex z) -> bool {
        for (const auto& r : result.roots)
            if (std::abs(r.lambda - z) < 1e-8 * (1.0 + std::abs(z))) return false;
        result.roots.push_back({z, std::abs(fn(z)) / scale(z)});
        return true;
    };

    while (!queue.empty()) {
        if (static_cast<int>(result.roots.size()) >= opts.max_roots) {
            result.complete = false;
            break;
        }
        auto [box, n] = queue.front();
        queue.pop_front();
        if (n <= 0) continue;

        const double diam = std::max(box.width(), box.height());
        const Complex starts[5] = {
            {0.5 * (box.zeta_lo + box.zeta_hi), 0.5 * (box.omega_lo + box.omega_hi)},
            {0.75 * box.zeta_lo + 0.25 * box.zeta_hi, 0.75 * box.omega_lo + 0.25 * box.omega_hi},
            {0.25 * box.zeta_lo + 0.75 * box.zeta_hi, 0.75 * box.omega_lo + 0.25 * box.omega_hi},
            {0.75 * box.zeta_lo + 0.25 * box.zeta_hi, 0.25 * box.omega_lo + 0.75 * box.omega_hi},
            {0.25 * box.zeta_lo + 0.75 * box.zeta_hi, 0.25 * box.omega_lo + 0.75 * box.omega_hi}};

        if (diam < 5e-8) {
            // box too small to split further: polish whatever is inside
            result.winding_counts.push_back({box, n});
            int found = 0;
            for (const Complex& s : starts) {
                if (auto z = newton_polish(fn, scale, s, opts.newton_tol)) {
                    if (in_box(*z, box, 1e-6) && record_root(*z) && ++found >= n) break;
                }
            }
            if (found < n) result.complete = false;
            continue;
        }

        if (n == 1) {
            const auto z = newton_polish(fn, scale, starts[0], opts.newton_tol);
            if (z && in_box(*z, box, 1e-5 * (1.0 + diam))) {
                result.winding_counts.push_back({box, 1});
                record_root(*z);
                continue;
            }
            // Newton escaped or failed: fall through and subdivide
        }

        const bool split_zeta = box.width() >= box.height();
        static const double fracs[5] = {0.5, 0.53090, 0.46910, 0.55902, 0.44098};
        bool done = false;
        for (double f : fracs) {
            RegionBox b1 = box, b2 = box;
            if (split_zeta) {
                const double m = box.zeta_lo + f * box.width();
                b1.zeta_hi = m;
                b2.zeta_lo = m;
            } else {
                const double m = box.omega_lo + f * box.height();
                b1.omega_hi = m;
                b2.omega_lo = m;
            }
            const auto c1 = winding_number(fn, scale, b1, osc);
            if (!c1) continue;
            const auto c2 = winding_number(fn, scale, b2, osc);
            if (!c2) continue;
            if (*c1 + *c2 != n) continue;  // missed a root on the split line
            queue.push_back({b1, *c1});
            queue.push_back({b2, *c2});
            done = true;
            break;
        }
        if (!done)
            throw NumericalError("winding computation unstable: no clean split after 5 jitters");
    }

    std::sort(result.roots.begin(), result.roots.end(), [](const RootRecord& a, const RootRecord& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    if (!result.roots.empty()) {
        Complex best = result.roots.front().lambda;
        for (const auto& r : result.roots)
            if (r.lambda.real() > best.real()) best = r.lambda;
        result.rightmost = best;
    }
    return result;
}

SpectrumResult find_roots(const KernelSet& kernels, RegionBox region, int max_roots) {
    RootFindOptions opts;
    opts.max_roots = max_roots;
    opts.boundary_samples_per_unit = std::max(2.0, kernels.a_dagger());
    auto fn = [&kernels](Complex z) { return kernels.char_fn(z); };
    auto scale = [&kernels](Complex z) { return kernels.char_scale(z); };
    SpectrumResult res = find_roots_fn(fn, scale, region, opts);

    // kernels are real: enforce conjugate symmetry inside the region
    std::vector<RootRecord> extra;
    for (const auto& r : res.roots) {
        if (std::abs(r.lambda.imag()) < 1e-9) continue;
        const Complex conj = std::conj(r.lambda);
        if (conj.imag() < region.omega_lo || conj.imag() > region.omega_hi) continue;
        bool present = false;
        for (const auto& s : res.roots)
            if (std::abs(s.lambda - conj) < 1e-7 * (1.0 + std::abs(conj))) present = true;
        for (const auto& s : extra)
            if (std::abs(s.lambda - conj) < 1e-7 * (1.0 + std::abs(conj))) present = true;
        if (!present) {
            if (auto z = newton_polish(fn, scale, conj, opts.newton_tol))
                extra.push_back({*z, std::abs(fn(*z)) / scale(*z)});
        }
    }
    res.roots.insert(res.roots.end(), extra.begin(), extra.end());
    std::sort(res.roots.begin(), res.roots.end(), [](const RootRecord& a, const RootRecord& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    if (!res.roots.empty()) {
        Complex best = res.roots.front().lambda;
        for (const auto& r : res.roots)
            if (r.lambda.real() > best.real()) best = r.lambda;
        res.rightmost = best;
    }
    return res;
}

namespace {

std::optional<Complex> march_strips(const std::function<Complex(Complex)>& fn,
                                    const std::function<double(Complex)>& scale, double start,
                                    double omega_max, double newton_tol, double osc) {
    const double kLeftLimit = -10.0;
    double top = start;
    RootFindOptions opts;
    opts.newton_tol = newton_tol;
    opts.max_roots = 64;
    opts.boundary_samples_per_unit = osc;
    while (top > kLeftLimit) {
        const double bottom = std::max(kLeftLimit, top - 1.0);
        RegionBox strip{bottom - 1e-3, top, -omega_max, omega_max};
        const SpectrumResult res = find_roots_fn(fn, scale, strip, opts);
        if (!res.roots.empty()) return res.rightmost;
        top = bottom;
    }
    return std::nullopt;
}

}  // namespace

std::optional<Complex> rightmost_root(const KernelSet& kernels, double omega_max) {
    const double start = std::max(2.0, kernels.right_bound());
    auto fn = [&kernels](Complex z) { return kernels.char_fn(z); };
    auto scale = [&kernels](Complex z) { return kernels.char_scale(z); };
    return march_strips(fn, scale, start, omega_max, 1e-10, std::max(2.0, kernels.a_dagger()));
}

DfeStability dfe_stability(const ModelSpec& spec, double alpha) {
    const EquilibriumPoint dfe = reconstruct_equilibrium(spec, alpha, 0.0);
    const KernelSet kernels(spec, dfe);
    DfeStability out;
    out.r0e = dfe.R0e;

    // epidemic factor 1 - P4: Psi4 >= 0, so the real root is rightmost
    double sup4 = 0.0;
    for (double v : kernels.psi(3).values()) sup4 = std::max(sup4, std::abs(v));
    if (sup4 > 1e-14) {
        auto t4 = [&](double x) { return kernels.transform(3, Complex(x, 0.0)).real(); };
        double lo, hi;
        if (t4(0.0) > 1.0) {
            lo = 0.0;
            hi = 1.0;
            while (t4(hi) > 1.0 && hi < 4096.0) hi *= 2.0;
        } else {
            hi = 0.0;
            lo = -1.0;
            while (t4(lo) < 1.0 && lo > -50.0) lo *= 2.0;
        }
        if (t4(lo) >= 1.0 && t4(hi) <= 1.0) {
            for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++i) {
                const double mid = 0.5 * (lo + hi);
                (t4(mid) > 1.0 ? lo : hi) = mid;
            }
            out.epidemic_factor_rightmost = Complex(0.5 * (lo + hi), 0.0);
        }
    }

    // demographic factor 1 - P1 (the Gurtin-MacCamy characteristic equation)
    auto f1 = [&kernels](Complex z) { return 1.0 - kernels.transform(0, z); };
    auto s1 = [&kernels](Complex z) { return 1.0 + std::abs(kernels.transform(0, z)); };
    double bound1 = 2.0;
    for (double x = 2.0; x <= 4096.0; x *= 2.0) {
        if (kernels.abs_bound(0, x) < 1.0) { bound1 = x; break; }
    }
    out.demographic_factor_rightmost =
        march_strips(f1, s1, std::max(2.0, bound1), spec.numerics().omega_max, 1e-10,
                     std::max(2.0, spec.a_dagger()));

    double worst = -std::numeric_limits<double>::infinity();
    if (out.epidemic_factor_rightmost)
        worst = std::max(worst, out.epidemic_factor_rightmost->real());
    if (out.demographic_factor_rightmost)
        worst = std::max(worst, out.demographic_factor_rightmost->real());
    const double tol = spec.numerics().stability_tol;
    out.verdict = worst > tol       ? StabilityVerdict::Unstable
                  : worst < -tol    ? StabilityVerdict::Stable
                                    : StabilityVerdict::Marginal;
    return out;
}

std::vector<TauThreshold> tau_thresholds(int k_max) {
    if (k_max < 2) throw std::invalid_argument("tau_thresholds: k_max >= 2 required");
    std::vector<TauThreshold> out;
    auto mom = [](double omega, bool sine) {
        const int panels = std::max(64, static_cast<int>(std::ceil(omega)));
        return integrate(
            [omega, sine](double a) {
                const double osc = sine ? std::sin(omega * a) : std::cos(omega * a);
                return osc * std::sin(2.0 * a) * std::cos(a);
            },
            0.0, kPi / 2.0, panels);
    };
    for (int k = 2; k <= k_max; ++k) {
        double lo = 2.0 * k + 0.6, hi = 2.0 * k + 1.4;
        double flo = mom(lo, true);
        if (flo * mom(hi, true) > 0.0)
            throw NumericalError("tau_thresholds: no bracket around omega = 2k+1");
        for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double fm = mom(mid, true);
            if (fm == 0.0) { lo = hi = mid; break; }
            if (flo * fm < 0.0) hi = mid;
            else { lo = mid; flo = fm; }
        }
        TauThreshold t;
        t.k = k;
        t.omega = 0.5 * (lo + hi);
        t.tau_numeric = 2.0 / (3.0 * mom(t.omega, false)) - 1.0;
        t.tau_closed = (k % 2 == 0) ? (1.0 - 4.0 * k * k) / 3.0
                                    : (-4.0 * k * k - 8.0 * k - 3.0) / 3.0;
        if (std::abs(t.tau_numeric - t.tau_closed) > 1e-8)
            throw NumericalError("tau_thresholds: quadrature resolution insufficient "
                                 "(numeric and closed forms disagree beyond 1e-8)");
        out.push_back(t);
    }
    return out;
}

namespace {

void require_section7_preset(const ModelSpec& spec) {
    auto close = [](double a, double b, double tol) { return std::abs(a - b) <= tol; };
    bool ok = close(spec.a_dagger(), kPi / 2.0, 1e-12) && close(spec.r0d(), 6.0, 1e-12) &&
              spec.phi_density().is_linear_capped() && close(spec.phi_density().ceiling(), 10.0, 1e-12);
    if (ok) {
        for (int i = 0; i <= 64 && ok; ++i) {
            const double a = 1.5 * i / 64.0;  // stay clear of the tan singularity
            const double s2c = 1.5 * std::sin(2.0 * a);
            ok = ok && close(spec.beta()(a), s2c, 1e-9) && close(spec.r()(a), s2c, 1e-9) &&
                 close(spec.q()(a), s2c, 1e-9) && close(spec.K()(a), a, 1e-9) &&
                 close(spec.mu()(a), std::tan(a), 1e-9);
        }
    }
    if (!ok)
        throw ValidationError("transversality_at_zero requires the specific model "
                              "R0d=6, beta=r=q=(3/2)sin(2a), mu=tan(a), K=a, Phi=max{1-x/10,0}");
}

}  // namespace

TransversalityReport transversality_at_zero(const ModelSpec& spec) {
    require_section7_preset(spec);
    const double ad = spec.a_dagger();

    const auto roots = find_endemic_W(spec, 0.0);
    if (roots.size() != 1)
        throw NumericalError("transversality_at_zero: expected a unique endemic state at alpha=0");
    TransversalityReport rep;
    rep.W_star0 = roots[0];
    const double W0 = rep.W_star0;

    const FGH fgh = eval_FGH(spec, 0.0, W0);
    rep.H0 = fgh.H;

    // dH/dalpha and dH/dW at (0, W*0), by their derivative kernels
    auto inner_int = [&](double s, auto&& weight) {
        return integrate(
            [&](double rho) {
                return weight(rho) * spec.K()(rho) *
                       std::exp(-W0 * spec.cumulative_contagion(rho));
            },
            0.0, s, 48, spec.k_breakpoints());
    };
    rep.H_alpha = -integrate(
        [&](double s) {
            return spec.q()(s) * spec.survival(s) *
                   inner_int(s, [s](double rho) { return s - rho; });
        },
        0.0, ad, 96, spec.k_breakpoints());
    rep.H_W = -integrate(
        [&](double s) {
            return spec.q()(s) * spec.survival(s) *
                   inner_int(s, [&](double rho) { return spec.cumulative_contagion(rho); });
        },
        0.0, ad, 96, spec.k_breakpoints());
    rep.W_star_prime0 = (12.0 / 125.0 * W0 - 1.0) * rep.H_alpha / rep.H_W;

    // kernels at the endemic point; at alpha=0: Psi2 == 0, Psi1 = (1+tau)(3/2)sin2a cos a
    const EquilibriumPoint pt = reconstruct_equilibrium(spec, 0.0, W0);
    const KernelSet kernels(spec, pt);

    auto moment = [&](auto&& f, bool sine) {
        return integrate(
            [&](double a) { return (sine ? std::sin(5.0 * a) : std::cos(5.0 * a)) * f(a); }, 0.0,
            ad, 160);
    };
    auto psi3 = [&](double a) { return kernels.psi(2)(a); };
    auto psi4 = [&](double a) { return kernels.psi(3)(a); };
    rep.A = 1.0 - moment(psi4, false);
    rep.B = moment(psi4, true);
    rep.E = moment(psi3, false);
    rep.F = moment(psi3, true);

    // E0(a) = int_0^a e^{-W0 s^2/2} ds, shared by both derivative kernels
    CumulativeIntegral E0([W0](double s) { return std::exp(-W0 * s * s / 2.0); },
                          make_panel_edges(0.0, ad, 256));
    auto dpsi1 = [&](double a) {
        return std::sin(2.0 * a) * std::cos(a) * (-3.0 * W0 + 6.0 * a - 6.0 * E0.eval(a));
    };
    rep.C = moment(dpsi1, false);
    rep.D = moment(dpsi1, true);

    auto dpsi2 = [&](double a) {
        if (a >= ad - 1e-14) return 0.0;
        return 50.0 * integrate(
                          [&](double s) {
                              return std::sin(2.0 * s) * std::cos(s) * (s - a) *
                                     (E0.eval(s) - E0.eval(s - a));
                          },
                          a, ad, 64);
    };
    rep.G = moment(dpsi2, false);
    rep.H = moment(dpsi2, true);

    rep.dF1_dalpha = -rep.A * rep.C - rep.B * rep.D - rep.E * rep.G + rep.F * rep.H;
    rep.dF2_dalpha = -rep.B * rep.C + rep.A * rep.D + rep.F * rep.G + rep.E * rep.H;
    rep.dF1_dzeta = 5.0 * kPi / 32.0 * rep.A + 2.0 / 3.0 * rep.B;
    rep.dF2_dzeta = 5.0 * kPi / 32.0 * rep.B - 2.0 / 3.0 * rep.A;
    rep.zeta_prime0 = (-rep.dF1_dalpha * rep.dF1_dzeta - rep.dF2_dalpha * rep.dF2_dzeta) /
                      (rep.dF1_dzeta * rep.dF1_dzeta + rep.dF2_dzeta * rep.dF2_dzeta);
    return rep;
}

}  // namespace agesi
