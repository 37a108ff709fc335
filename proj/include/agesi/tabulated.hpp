#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace agesi {

/// Sampled function on [0, a_dagger] with piecewise-cubic (Catmull-Rom)
/// interpolation. Nodes are strictly increasing, first 0, last a_dagger.
class TabulatedFn {
  public:
    TabulatedFn() = default;
    TabulatedFn(std::vector<double> nodes, std::vector<double> values);

    double operator()(double x) const;
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    static TabulatedFn uniform(double a_dagger, std::size_t n_nodes,
                               const std::vector<double>& values);

  private:
    std::size_t cell(double x) const;

    std::vector<double> nodes_;
    std::vector<double> values_;
    bool uniform_ = false;
};

}  // namespace agesi
