#include "kinchem/profile.hpp"

#include <cmath>
#include <stdexcept>

namespace kinchem {

Profile::Profile(const SpatialGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.size())
        throw std::invalid_argument("profile value count does not match grid");
}

Profile::Profile(const SpatialGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

double Profile::mass() const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i) m += grid_.weight(i) * values_[i];
    return m;
}

double Profile::moment(int k) const {
    double m = 0.0;
    for (int i = 0; i < size(); ++i)
        m += grid_.weight(i) * std::pow(grid_.node(i), k) * values_[i];
    return m;
}

double Profile::l1_distance(const Profile& other) const {
    if (!grid_.same_layout(other.grid()))
        throw std::invalid_argument("profiles live on different grids");
    double d = 0.0;
    for (int i = 0; i < size(); ++i)
        d += grid_.weight(i) * std::abs(values_[i] - other.values_[i]);
    return d;
}

double Profile::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

PhaseField::PhaseField(const SpatialGrid& xgrid, const VelocityGrid& vgrid)
    : xgrid_(xgrid), vgrid_(vgrid), nv_(vgrid.size()),
      data_(static_cast<std::size_t>(xgrid.size()) * vgrid.size(), 0.0) {}

DensityProfile PhaseField::density() const {
    DensityProfile rho(xgrid_);
    for (int i = 0; i < nx(); ++i) {
        double s = 0.0;
        for (int j = 0; j < nv_; ++j) s += vgrid_.weight(j) * (*this)(i, j);
        rho[i] = s;
    }
    return rho;
}

double PhaseField::mass() const {
    double m = 0.0;
    for (int i = 0; i < nx(); ++i) {
        double s = 0.0;
        for (int j = 0; j < nv_; ++j) s += vgrid_.weight(j) * (*this)(i, j);
        m += xgrid_.weight(i) * s;
    }
    return m;
}

double PhaseField::moment(int m, int n) const {
    double acc = 0.0;
    for (int i = 0; i < nx(); ++i) {
        const double xw = xgrid_.weight(i) * std::pow(xgrid_.node(i), m);
        double s = 0.0;
        for (int j = 0; j < nv_; ++j)
            s += vgrid_.weight(j) * std::pow(vgrid_.node(j), n) * (*this)(i, j);
        acc += xw * s;
    }
    return acc;
}

double PhaseField::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

} // namespace kinchem
