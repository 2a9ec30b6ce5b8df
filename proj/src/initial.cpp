#include "kinchem/initial.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "kinchem/io.hpp"

namespace kinchem {

PhaseField build_initial(const InitialCondition& ic, const SpatialGrid& xgrid,
                         const VelocityGrid& vgrid) {
    if (ic.family == InitialFamily::File) {
        PhaseField f = read_field(ic.path);
        if (!f.xgrid().same_layout(xgrid) || !f.vgrid().same_layout(vgrid))
            throw std::invalid_argument("snapshot grid does not match configured grids");
        return f;
    }
    if (!(ic.mass > 0.0) || !(ic.x_width > 0.0) || !(ic.v_width > 0.0))
        throw std::invalid_argument("initial condition needs positive mass and widths");

    std::function<double(double, double)> shape;
    switch (ic.family) {
        case InitialFamily::GaussianProduct:
            shape = [&](double x, double v) {
                const double a = (x - ic.x_center) / ic.x_width;
                const double b = (v - ic.v_center) / ic.v_width;
                return std::exp(-0.5 * (a * a + b * b));
            };
            break;
        case InitialFamily::ExponentialSignal:
            shape = [&](double x, double v) {
                return std::exp(-std::abs(x - ic.x_center) / ic.x_width -
                                std::abs(v - ic.v_center) / ic.v_width);
            };
            break;
        case InitialFamily::DoubleBump:
            shape = [&](double x, double v) {
                const double h = 0.5 * ic.separation;
                const double a1 = (x - ic.x_center - h) / ic.x_width;
                const double a2 = (x - ic.x_center + h) / ic.x_width;
                const double b = (v - ic.v_center) / ic.v_width;
                return (std::exp(-0.5 * a1 * a1) + std::exp(-0.5 * a2 * a2)) *
                       std::exp(-0.5 * b * b);
            };
            break;
        default:
            throw std::invalid_argument("unknown initial condition family");
    }

    PhaseField f(xgrid, vgrid);
    for (int i = 0; i < xgrid.size(); ++i)
        for (int j = 0; j < vgrid.size(); ++j)
            f(i, j) = shape(xgrid.node(i), vgrid.node(j));
    const double m = f.mass();
    if (m <= 0.0) throw std::invalid_argument("initial shape vanishes on the grid");
    for (double& v : f.data()) v *= ic.mass / m;
    return f;
}

CenterFrameResult center_frame(const PhaseField& f_I) {
    const double M = f_I.mass();
    if (M <= 0.0) throw std::invalid_argument("recentering needs positive mass");
    const double a10 = f_I.moment(1, 0);
    const double a01 = f_I.moment(0, 1);
    const double shift = (a10 + a01 / M) / M;

    const SpatialGrid& xg = f_I.xgrid();
    PhaseField out(xg, f_I.vgrid());
    std::vector<double> column(xg.size());
    for (int j = 0; j < f_I.nv(); ++j) {
        for (int i = 0; i < xg.size(); ++i) column[i] = f_I(i, j);
        for (int i = 0; i < xg.size(); ++i) {
            const double val = sample_cubic(xg, column, xg.node(i) + shift);
            out(i, j) = val < 0.0 ? 0.0 : val;
        }
    }
    return {std::move(out), shift, a01};
}

} // namespace kinchem
