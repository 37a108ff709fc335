#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace agesi {

/// 8-point Gauss-Legendre rule on [-1,1].
struct GaussLegendre8 {
    static constexpr int n = 8;
    static const double node[8];
    static const double weight[8];
};

/// Integrate f over [lo,hi] with a single 8-point panel.
template <typename F>
double gl8_panel(F&& f, double lo, double hi) {
    const double c = 0.5 * (hi + lo), h = 0.5 * (hi - lo);
    double s = 0.0;
    for (int i = 0; i < GaussLegendre8::n; ++i)
        s += GaussLegendre8::weight[i] * f(c + h * GaussLegendre8::node[i]);
    return h * s;
}

/// Sorted panel edges over [lo,hi], aligned to the given breakpoints.
/// Each breakpoint-free segment is subdivided so the total count is at
/// least `min_panels` and no panel is wider than (hi-lo)/min_panels.
std::vector<double> make_panel_edges(double lo, double hi, int min_panels,
                                     const std::vector<double>& breakpoints = {});

/// Composite Gauss-Legendre integral over prebuilt edges.
template <typename F>
double integrate_edges(F&& f, const std::vector<double>& edges) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
        s += gl8_panel(f, edges[k], edges[k + 1]);
    return s;
}

template <typename F>
double integrate(F&& f, double lo, double hi, int min_panels,
                 const std::vector<double>& breakpoints = {}) {
    return integrate_edges(f, make_panel_edges(lo, hi, min_panels, breakpoints));
}

/// Cumulative integral M(x) = int_0^x f, precomputed at panel edges; eval(x)
/// finishes the partial panel with a local GL pass. Queries are O(log n).
class CumulativeIntegral {
  public:
    CumulativeIntegral() = default;
    CumulativeIntegral(std::function<double(double)> f, std::vector<double> edges);

    double eval(double x) const;
    double domain_hi() const { return edges_.empty() ? 0.0 : edges_.back(); }
    const std::vector<double>& edges() const { return edges_; }

  private:
    std::function<double(double)> f_;
    std::vector<double> edges_;
    std::vector<double> prefix_;  // prefix_[k] = int_{edges_[0]}^{edges_[k]} f
};

/// J(x) = int_0^x f(rho) e^{-alpha (x - rho)} drho, tabulated at panel edges
/// through the stable recurrence J_{k+1} = e^{-alpha h} J_k + local panel
/// integral. All exponents stay in [-alpha h, 0], so large alpha is safe.
/// eval(x) continues exactly from the nearest lower edge.
class ExpCumulative {
  public:
    ExpCumulative() = default;
    ExpCumulative(std::function<double(double)> f, double alpha, std::vector<double> edges);

    double eval(double x) const;
    double alpha() const { return alpha_; }

  private:
    double local(double lo, double hi) const;  // int_lo^hi f(rho) e^{-alpha(hi-rho)} drho

    std::function<double(double)> f_;
    double alpha_ = 0.0;
    std::vector<double> edges_;
    std::vector<double> at_edges_;
};

}  // namespace agesi
