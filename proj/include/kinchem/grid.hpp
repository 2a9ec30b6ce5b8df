#pragma once

#include <utility>
#include <vector>

namespace kinchem {

/// Uniform symmetric grid on [-half_width, half_width] with an odd node count,
/// so that 0 is a node and node(i) == -node(size()-1-i) holds exactly
/// (nodes are generated as (i - center)*spacing).
class UniformGrid {
public:
    /// Throws std::invalid_argument unless half_width > 0 and count is odd
    /// and >= 4 (hence >= 5).
    UniformGrid(double half_width, int count);

    int size() const { return count_; }
    double half_width() const { return half_width_; }
    double spacing() const { return dx_; }
    int center_index() const { return center_; }
    double node(int i) const { return (i - center_) * dx_; }
    const std::vector<double>& nodes() const { return nodes_; }

    /// Trapezoid weight: spacing at interior nodes, half at the two ends.
    double weight(int i) const { return (i == 0 || i == count_ - 1) ? 0.5 * dx_ : dx_; }

    bool same_layout(const UniformGrid& other) const {
        return count_ == other.count_ && half_width_ == other.half_width_;
    }

private:
    double half_width_;
    int count_;
    int center_;
    double dx_;
    std::vector<double> nodes_;
};

class SpatialGrid : public UniformGrid {
public:
    using UniformGrid::UniformGrid;
};

class VelocityGrid : public UniformGrid {
public:
    using UniformGrid::UniformGrid;
};

std::pair<SpatialGrid, VelocityGrid> make_grids(double space_half_width, int space_count,
                                                double velocity_half_width, int velocity_count);

/// Piecewise-linear sampling of nodal values at position x; zero outside the grid.
double sample_linear(const UniformGrid& grid, const std::vector<double>& values, double x);

/// Four-point Lagrange (cubic) sampling at x. Falls back to linear in the
/// outermost cells, zero outside the grid.
double sample_cubic(const UniformGrid& grid, const std::vector<double>& values, double x);

} // namespace kinchem
