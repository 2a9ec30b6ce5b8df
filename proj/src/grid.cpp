#include "kinchem/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace kinchem {

UniformGrid::UniformGrid(double half_width, int count)
    : half_width_(half_width), count_(count), center_(count / 2) {
    if (!(half_width > 0.0))
        throw std::invalid_argument("grid half-width must be positive");
    if (count < 5)
        throw std::invalid_argument("grid needs at least 5 nodes");
    if (count % 2 == 0)
        throw std::invalid_argument("grid node count must be odd so 0 is a node");
    dx_ = half_width / center_;
    nodes_.resize(count_);
    for (int i = 0; i < count_; ++i) nodes_[i] = node(i);
}

std::pair<SpatialGrid, VelocityGrid> make_grids(double space_half_width, int space_count,
                                                double velocity_half_width, int velocity_count) {
    return {SpatialGrid(space_half_width, space_count),
            VelocityGrid(velocity_half_width, velocity_count)};
}

double sample_linear(const UniformGrid& grid, const std::vector<double>& values, double x) {
    const double dx = grid.spacing();
    const double pos = x / dx + grid.center_index();
    if (pos <= 0.0 || pos >= grid.size() - 1) {
        // exact node hits at the boundary still count
        if (pos == 0.0) return values[0];
        if (pos == grid.size() - 1) return values[grid.size() - 1];
        return 0.0;
    }
    const int i = static_cast<int>(std::floor(pos));
    const double w = pos - i;
    return (1.0 - w) * values[i] + w * values[i + 1];
}

double sample_cubic(const UniformGrid& grid, const std::vector<double>& values, double x) {
    const double dx = grid.spacing();
    const double pos = x / dx + grid.center_index();
    if (pos <= 0.0 || pos >= grid.size() - 1) {
        if (pos == 0.0) return values[0];
        if (pos == grid.size() - 1) return values[grid.size() - 1];
        return 0.0;
    }
    const int i = static_cast<int>(std::floor(pos));
    if (i < 1 || i > grid.size() - 3) {
        const double w = pos - i;
        return (1.0 - w) * values[i] + w * values[i + 1];
    }
    // Lagrange basis on the four nodes i-1..i+2, s measured from node i
    const double s = pos - i;
    const double sm = s - 1.0, sp = s + 1.0, s2 = s - 2.0;
    const double c0 = -s * sm * s2 / 6.0;
    const double c1 = sp * sm * s2 / 2.0;
    const double c2 = -sp * s * s2 / 2.0;
    const double c3 = sp * s * sm / 6.0;
    return c0 * values[i - 1] + c1 * values[i] + c2 * values[i + 1] + c3 * values[i + 2];
}

} // namespace kinchem
