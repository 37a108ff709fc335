#include "agesi/tabulated.hpp"

#include <algorithm>
#include <cmath>

namespace agesi {

TabulatedFn::TabulatedFn(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
    if (nodes_.size() != values_.size() || nodes_.size() < 2)
        throw std::invalid_argument("TabulatedFn: need matching nodes/values, >= 2");
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
        if (!(nodes_[i] < nodes_[i + 1]))
            throw std::invalid_argument("TabulatedFn: nodes must be strictly increasing");
    if (nodes_.front() != 0.0)
        throw std::invalid_argument("TabulatedFn: first node must be 0");
    const double h0 = nodes_[1] - nodes_[0];
    uniform_ = true;
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
        if (std::abs((nodes_[i + 1] - nodes_[i]) - h0) > 1e-9 * h0) { uniform_ = false; break; }
}

TabulatedFn TabulatedFn::uniform(double a_dagger, std::size_t n_nodes,
                                 const std::vector<double>& values) {
    std::vector<double> nodes(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        nodes[i] = a_dagger * static_cast<double>(i) / static_cast<double>(n_nodes - 1);
    return TabulatedFn(std::move(nodes), values);
}

std::size_t TabulatedFn::cell(double x) const {
    if (uniform_) {
        const double h = nodes_[1] - nodes_[0];
        auto k = static_cast<std::ptrdiff_t>((x - nodes_.front()) / h);
        k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(nodes_.size()) - 2);
        return static_cast<std::size_t>(k);
    }
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    const auto k = static_cast<std::ptrdiff_t>(it - nodes_.begin()) - 1;
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        k, 0, static_cast<std::ptrdiff_t>(nodes_.size()) - 2));
}

double TabulatedFn::operator()(double x) const {
    if (x <= nodes_.front()) return values_.front();
    if (x >= nodes_.back()) return values_.back();
    const std::size_t k = cell(x);
    const double h = nodes_[k + 1] - nodes_[k];
    const double t = (x - nodes_[k]) / h;
    const double y1 = values_[k], y2 = values_[k + 1];
    // Catmull-Rom tangents, one-sided at the ends
    const double m1h = (k == 0) ? (y2 - y1) : (y2 - values_[k - 1]) * h / (nodes_[k + 1] - nodes_[k - 1]);
    const double m2h = (k + 2 == nodes_.size())
                           ? (y2 - y1)
                           : (values_[k + 2] - y1) * h / (nodes_[k + 2] - nodes_[k]);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y1 + (t3 - 2 * t2 + t) * m1h +
           (-2 * t3 + 3 * t2) * y2 + (t3 - t2) * m2h;
}

}  // namespace agesi
