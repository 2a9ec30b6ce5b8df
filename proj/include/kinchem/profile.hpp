#pragma once

#include <vector>

#include "kinchem/grid.hpp"

namespace kinchem {

/// Nodal values of a function of x on a spatial grid, with trapezoid
/// integration helpers. Used for both densities and signals.
class Profile {
public:
    Profile() = default;
    Profile(const SpatialGrid& grid, std::vector<double> values);
    /// Zero profile.
    explicit Profile(const SpatialGrid& grid);

    const SpatialGrid& grid() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double mass() const;
    /// Trapezoid integral of x^k * value.
    double moment(int k) const;
    double l1_distance(const Profile& other) const;
    double max_abs() const;

private:
    SpatialGrid grid_{1.0, 5};
    std::vector<double> values_;
};

using DensityProfile = Profile;
using SignalProfile = Profile;

/// Phase-space field f(x, v) stored row-major: value(i, j) = data[i*nv + j]
/// with i the spatial index and j the velocity index.
class PhaseField {
public:
    PhaseField() : PhaseField(SpatialGrid(1.0, 5), VelocityGrid(1.0, 5)) {}
    PhaseField(const SpatialGrid& xgrid, const VelocityGrid& vgrid);

    const SpatialGrid& xgrid() const { return xgrid_; }
    const VelocityGrid& vgrid() const { return vgrid_; }
    int nx() const { return xgrid_.size(); }
    int nv() const { return vgrid_.size(); }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * nv_ + j]; }
    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * nv_ + j]; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    /// Velocity marginal rho(x) = integral of f(x, .) dv.
    DensityProfile density() const;
    double mass() const;
    /// Integral of x^m v^n f dx dv.
    double moment(int m, int n) const;
    double max_abs() const;

private:
    SpatialGrid xgrid_{1.0, 5};
    VelocityGrid vgrid_{1.0, 5};
    int nv_ = 5;
    std::vector<double> data_;
};

} // namespace kinchem
