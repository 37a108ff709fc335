#include "agesi/quadrature.hpp"

#include <algorithm>

namespace agesi {

const double GaussLegendre8::node[8] = {
    -0.9602898564975362, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975362};
const double GaussLegendre8::weight[8] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

std::vector<double> make_panel_edges(double lo, double hi, int min_panels,
                                     const std::vector<double>& breakpoints) {
    if (!(hi > lo)) throw std::invalid_argument("make_panel_edges: empty interval");
    if (min_panels < 1) min_panels = 1;
    std::vector<double> seg{lo};
    for (double b : breakpoints)
        if (b > lo + 1e-14 * (hi - lo) && b < hi - 1e-14 * (hi - lo)) seg.push_back(b);
    seg.push_back(hi);
    std::sort(seg.begin(), seg.end());
    seg.erase(std::unique(seg.begin(), seg.end(),
                          [&](double a, double b) { return b - a < 1e-13 * (hi - lo); }),
              seg.end());
    if (seg.back() != hi) seg.back() = hi;

    const double hmax = (hi - lo) / min_panels;
    std::vector<double> edges{lo};
    for (std::size_t k = 0; k + 1 < seg.size(); ++k) {
        const double a = seg[k], b = seg[k + 1];
        const int m = std::max(1, static_cast<int>(std::ceil((b - a) / hmax - 1e-12)));
        for (int j = 1; j <= m; ++j) edges.push_back(a + (b - a) * j / m);
    }
    edges.back() = hi;
    return edges;
}

CumulativeIntegral::CumulativeIntegral(std::function<double(double)> f, std::vector<double> edges)
    : f_(std::move(f)), edges_(std::move(edges)) {
    prefix_.resize(edges_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < edges_.size(); ++k)
        prefix_[k + 1] = prefix_[k] + gl8_panel(f_, edges_[k], edges_[k + 1]);
}

double CumulativeIntegral::eval(double x) const {
    if (edges_.empty() || x <= edges_.front()) return 0.0;
    if (x >= edges_.back()) return prefix_.back();
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - edges_.begin()) - 1;
    if (x - edges_[k] < 1e-300) return prefix_[k];
    return prefix_[k] + gl8_panel(f_, edges_[k], x);
}

ExpCumulative::ExpCumulative(std::function<double(double)> f, double alpha,
                             std::vector<double> edges)
    : f_(std::move(f)), alpha_(alpha), edges_(std::move(edges)) {
    at_edges_.resize(edges_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < edges_.size(); ++k) {
        const double h = edges_[k + 1] - edges_[k];
        at_edges_[k + 1] = std::exp(-alpha_ * h) * at_edges_[k] + local(edges_[k], edges_[k + 1]);
    }
}

double ExpCumulative::local(double lo, double hi) const {
    // exponent -alpha (hi - rho) in [-alpha h, 0]; split so GL-8 resolves it
    const int sub = std::max(1, static_cast<int>(std::ceil(std::abs(alpha_) * (hi - lo) / 2.0)));
    double s = 0.0;
    for (int j = 0; j < sub; ++j) {
        const double a = lo + (hi - lo) * j / sub, b = lo + (hi - lo) * (j + 1) / sub;
        s += gl8_panel([&](double r) { return f_(r) * std::exp(-alpha_ * (hi - r)); }, a, b);
    }
    return s;
}

double ExpCumulative::eval(double x) const {
    if (edges_.empty() || x <= edges_.front()) return 0.0;
    if (x >= edges_.back()) x = edges_.back();
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - edges_.begin());
    if (k > 0) --k;
    if (k + 1 < edges_.size() && x >= edges_[k + 1]) k = edges_.size() - 1;
    const double base = std::exp(-alpha_ * (x - edges_[k])) * at_edges_[k];
    if (x - edges_[k] < 1e-300) return base;
    return base + local(edges_[k], x);
}

}  // namespace agesi
