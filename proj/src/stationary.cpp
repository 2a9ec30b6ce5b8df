#include "kinchem/stationary.hpp"

#include <cmath>
#include <stdexcept>

#include "kinchem/errors.hpp"
#include "kinchem/quadrature.hpp"
#include "kinchem/signal.hpp"

namespace kinchem {

namespace {

/// Nodes s_q = -ln(u_q)/M and weights for int_0^infty e^{-Ms} g(s) ds
/// = (1/M) int_0^1 g(s(u)) du.
struct MildRule {
    std::vector<double> s;
    std::vector<double> w; // include the 1/M factor
    MildRule(double mass, int points) {
        const QuadratureRule gl = gauss_legendre(points, 0.0, 1.0);
        s.resize(gl.nodes.size());
        w.resize(gl.nodes.size());
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            s[q] = -std::log(gl.nodes[q]) / mass;
            w[q] = gl.weights[q] / mass;
        }
    }
};

double sample(const UniformGrid& g, const std::vector<double>& v, double x,
              InterpolationKind kind) {
    return kind == InterpolationKind::Linear ? sample_linear(g, v, x) : sample_cubic(g, v, x);
}

} // namespace

PhaseField mild_apply(const DensityProfile& rho, double mass, const VelocityGrid& vgrid,
                      int s_points, InterpolationKind sampling) {
    if (mass <= 0.0) throw std::invalid_argument("mild form needs positive mass");
    const SpatialGrid& xg = rho.grid();
    const SignalProfile S = convolve_signal(rho);
    const MildRule rule(mass, s_points);

    PhaseField f(xg, vgrid);
    for (int j = 0; j < vgrid.size(); ++j) {
        const double v = vgrid.node(j);
        for (std::size_t q = 0; q < rule.s.size(); ++q) {
            const double sv = rule.s[q] * v;
            const double wq = rule.w[q];
            for (int i = 0; i < xg.size(); ++i) {
                const double x = xg.node(i);
                f(i, j) += wq * sample(xg, rho.values(), x - sv, sampling) *
                           sample(xg, S.values(), x + v - sv, sampling);
            }
        }
    }
    return f;
}

StationaryResult solve_stationary(double mass, const SpatialGrid& xgrid,
                                  const VelocityGrid& vgrid, const StationaryOptions& options) {
    if (mass <= 2.0)
        throw CriticalMassNotExceeded("stationary construction requires M > 2");

    StationaryResult result;
    result.mass = mass;

    DensityProfile rho(xgrid);
    for (int i = 0; i < xgrid.size(); ++i) {
        const double x = xgrid.node(i);
        rho[i] = options.init == StationaryOptions::Init::SignalKernel
                     ? 0.5 * mass * std::exp(-std::abs(x))
                     : mass / std::sqrt(2.0 * M_PI) * std::exp(-0.5 * x * x);
    }

    const int n = xgrid.size();
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        const PhaseField f = mild_apply(rho, mass, vgrid, options.s_points, options.sampling);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < vgrid.size(); ++j)
                result.max_velocity_weighted = std::max(
                    result.max_velocity_weighted, std::abs(vgrid.node(j)) * f(i, j));

        DensityProfile next = f.density();
        // even-symmetrize, clamp interpolation undershoot, restore the mass
        for (int i = 0; i < n / 2 + 1; ++i) {
            const double avg = 0.5 * (next[i] + next[n - 1 - i]);
            next[i] = next[n - 1 - i] = avg < 0.0 ? 0.0 : avg;
        }
        const double m = next.mass();
        result.max_mass_defect = std::max(result.max_mass_defect, std::abs(m - mass));
        if (m <= 0.0) break;
        for (int i = 0; i < n; ++i) next[i] *= mass / m;

        if (options.damping != 1.0)
            for (int i = 0; i < n; ++i)
                next[i] = (1.0 - options.damping) * rho[i] + options.damping * next[i];

        result.last_update = next.l1_distance(rho);
        rho = next;
        result.sweeps = sweep;
        if (result.last_update < options.tol * mass) {
            result.converged = true;
            break;
        }
    }

    result.rho = rho;
    result.f = mild_apply(rho, mass, vgrid, options.s_points, options.sampling);
    result.moments = compute_moments(result.f, 2);

    // strong-form residual v df/dx - rho S(x+v) + M f, central differences
    const SignalProfile S = convolve_signal(rho);
    const double dx = xgrid.spacing();
    double res = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double x = xgrid.node(i);
        for (int j = 0; j < vgrid.size(); ++j) {
            const double v = vgrid.node(j);
            const double dfdx = (result.f(i + 1, j) - result.f(i - 1, j)) / (2.0 * dx);
            const double r = v * dfdx -
                             rho[i] * sample_linear(xgrid, S.values(), x + v) +
                             mass * result.f(i, j);
            res += xgrid.weight(i) * vgrid.weight(j) * std::abs(r);
        }
    }
    result.residual_l1 = res;

    double conf = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = xgrid.node(i);
        for (int j = 0; j < vgrid.size(); ++j) {
            const double v = vgrid.node(j);
            conf += xgrid.weight(i) * vgrid.weight(j) * (1.0 + x * x + v * v) * result.f(i, j);
        }
    }
    result.confinement = conf;
    return result;
}

double SpectralProfile::operator()(double xi) const {
    // even extension, zero beyond the band
    const double a = std::abs(xi);
    if (a > xi_max) return 0.0;
    const double dxi = spacing();
    const double pos = a / dxi;
    const int n = size();
    int k = static_cast<int>(std::floor(pos));
    if (k >= n - 1) return values[n - 1];
    const double t = pos - k;
    if (k >= 1 && k <= n - 3) {
        const double tm = t - 1.0, tp = t + 1.0, t2 = t - 2.0;
        return (-t * tm * t2 / 6.0) * values[k - 1] + (tp * tm * t2 / 2.0) * values[k] +
               (-tp * t * t2 / 2.0) * values[k + 1] + (tp * t * tm / 6.0) * values[k + 2];
    }
    if (k == 0) {
        // use the even reflection value[1] at xi = -dxi for a centered cubic
        const double tm = t - 1.0, tp = t + 1.0, t2 = t - 2.0;
        return (-t * tm * t2 / 6.0) * values[1] + (tp * tm * t2 / 2.0) * values[0] +
               (-tp * t * t2 / 2.0) * values[1] + (tp * t * tm / 6.0) * values[2];
    }
    return (1.0 - t) * values[k] + t * values[k + 1];
}

double fourier_rhs(const SpectralProfile& rho_hat, double mass, double xi, int s_points) {
    const MildRule rule(mass, s_points); // weights carry the e^{-Ms} ds measure
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.s.size(); ++q) {
        const double s = rule.s[q];
        const double a = xi * s;
        acc += rule.w[q] * rho_hat(xi * (1.0 - s)) * rho_hat(a) / (1.0 + a * a);
    }
    return acc;
}

SpectralResult solve_stationary_spectral(double mass, double xi_max, int n_xi,
                                         const SpatialGrid& xgrid,
                                         const SpectralOptions& options) {
    if (mass <= 2.0)
        throw CriticalMassNotExceeded("stationary construction requires M > 2");
    if (n_xi < 5 || xi_max <= 0.0)
        throw std::invalid_argument("spectral band needs xi_max > 0 and n_xi >= 5");

    SpectralResult result;
    SpectralProfile rh;
    rh.xi_max = xi_max;
    rh.values.resize(n_xi);
    // transform of the signal-kernel initializer (M/2) e^{-|x|}
    for (int q = 0; q < n_xi; ++q) {
        const double xi = rh.node(q);
        rh.values[q] = mass / (1.0 + xi * xi);
    }

    const int nx = xgrid.size();
    const double dxi = rh.spacing();
    std::vector<double> wxi(n_xi, dxi);
    wxi[0] = wxi[n_xi - 1] = 0.5 * dxi;

    // cosine tables for the band filter (reconstruct, clamp, renormalize)
    std::vector<double> cosx(static_cast<std::size_t>(nx) * n_xi);
    for (int i = 0; i < nx; ++i)
        for (int q = 0; q < n_xi; ++q)
            cosx[static_cast<std::size_t>(i) * n_xi + q] = std::cos(xgrid.node(i) * rh.node(q));

    std::vector<double> rho(nx), filtered(n_xi);
    auto filter = [&](std::vector<double>& vals) {
        for (int i = 0; i < nx; ++i) {
            double acc = 0.0;
            const double* row = &cosx[static_cast<std::size_t>(i) * n_xi];
            for (int q = 0; q < n_xi; ++q) acc += wxi[q] * row[q] * vals[q];
            rho[i] = std::max(acc / M_PI, 0.0);
        }
        double m = 0.0;
        for (int i = 0; i < nx; ++i) m += xgrid.weight(i) * rho[i];
        if (m > 0.0)
            for (int i = 0; i < nx; ++i) rho[i] *= mass / m;
        for (int q = 0; q < n_xi; ++q) {
            double acc = 0.0;
            for (int i = 0; i < nx; ++i)
                acc += xgrid.weight(i) * cosx[static_cast<std::size_t>(i) * n_xi + q] * rho[i];
            filtered[q] = acc;
        }
        vals = filtered;
    };

    const double w = options.damping;
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        std::vector<double> next(n_xi);
        for (int q = 0; q < n_xi; ++q)
            next[q] = (1.0 - w) * rh.values[q] + w * fourier_rhs(rh, mass, rh.node(q), options.s_points);
        filter(next);
        next[0] = mass;

        double upd = 0.0, amax = 0.0;
        for (int q = 0; q < n_xi; ++q) {
            upd = std::max(upd, std::abs(next[q] - rh.values[q]));
            amax = std::max(amax, std::abs(next[q]));
        }
        rh.values = next;
        result.last_update = upd;
        result.max_abs_rho_hat = std::max(result.max_abs_rho_hat, amax);
        result.sweeps = sweep;
        if (upd < options.tol) {
            result.converged = true;
            break;
        }
    }

    result.rho_hat = rh;
    DensityProfile rec(xgrid);
    result.min_reconstructed = 0.0;
    for (int i = 0; i < nx; ++i) {
        double acc = 0.0;
        const double* row = &cosx[static_cast<std::size_t>(i) * n_xi];
        for (int q = 0; q < n_xi; ++q) acc += wxi[q] * row[q] * rh.values[q];
        rec[i] = acc / M_PI;
        result.min_reconstructed = std::min(result.min_reconstructed, rec[i]);
    }
    result.rho = rec;
    return result;
}

RegularityReport regularity_diagnostic(const PhaseField& f, double xi_max, int n_xi,
                                       double k_max, int n_k) {
    const SpatialGrid& xg = f.xgrid();
    const VelocityGrid& vg = f.vgrid();
    const int nx = xg.size(), nv = vg.size();

    std::vector<double> xi(n_xi), kk(n_k);
    for (int a = 0; a < n_xi; ++a) xi[a] = xi_max * a / (n_xi - 1);
    for (int b = 0; b < n_k; ++b) kk[b] = k_max * b / (n_k - 1);

    // f_hat(xi,k) = sum w f cos(xi x + k v); odd part from the sin transform
    std::vector<double> cv(static_cast<std::size_t>(nv) * n_k), sv(cv.size());
    for (int j = 0; j < nv; ++j)
        for (int b = 0; b < n_k; ++b) {
            cv[static_cast<std::size_t>(j) * n_k + b] = std::cos(vg.node(j) * kk[b]);
            sv[static_cast<std::size_t>(j) * n_k + b] = std::sin(vg.node(j) * kk[b]);
        }

    std::vector<double> tc(static_cast<std::size_t>(nx) * n_k, 0.0), ts(tc.size(), 0.0);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double fw = vg.weight(j) * f(i, j);
            if (fw == 0.0) continue;
            const double* cvr = &cv[static_cast<std::size_t>(j) * n_k];
            const double* svr = &sv[static_cast<std::size_t>(j) * n_k];
            double* tcr = &tc[static_cast<std::size_t>(i) * n_k];
            double* tsr = &ts[static_cast<std::size_t>(i) * n_k];
            for (int b = 0; b < n_k; ++b) {
                tcr[b] += fw * cvr[b];
                tsr[b] += fw * svr[b];
            }
        }
    }

    std::vector<double> fhat(static_cast<std::size_t>(n_xi) * n_k, 0.0), fodd(fhat.size(), 0.0);
    for (int a = 0; a < n_xi; ++a) {
        for (int i = 0; i < nx; ++i) {
            const double arg = xi[a] * xg.node(i);
            const double cw = xg.weight(i) * std::cos(arg);
            const double sw = xg.weight(i) * std::sin(arg);
            const double* tcr = &tc[static_cast<std::size_t>(i) * n_k];
            const double* tsr = &ts[static_cast<std::size_t>(i) * n_k];
            double* fr = &fhat[static_cast<std::size_t>(a) * n_k];
            double* fo = &fodd[static_cast<std::size_t>(a) * n_k];
            for (int b = 0; b < n_k; ++b) {
                fr[b] += cw * tcr[b] - sw * tsr[b]; // cos(xi x + k v) part
                fo[b] += sw * tcr[b] + cw * tsr[b]; // sin part, zero for even f
            }
        }
    }

    RegularityReport report;
    report.fhat_origin = fhat[0];
    for (double v : fodd) report.asymmetry = std::max(report.asymmetry, std::abs(v));
    if (report.fhat_origin != 0.0) report.asymmetry /= std::abs(report.fhat_origin);

    // radial shells
    const double rmax = std::sqrt(xi_max * xi_max + k_max * k_max);
    const int shells = 24;
    report.shell_radii.assign(shells, 0.0);
    report.shell_maxima.assign(shells, 0.0);
    for (int a = 0; a < n_xi; ++a)
        for (int b = 0; b < n_k; ++b) {
            const double r = std::hypot(xi[a], kk[b]);
            int m = static_cast<int>(r / rmax * shells);
            if (m >= shells) m = shells - 1;
            report.shell_maxima[m] =
                std::max(report.shell_maxima[m], std::abs(fhat[static_cast<std::size_t>(a) * n_k + b]));
        }
    for (int m = 0; m < shells; ++m) report.shell_radii[m] = rmax * (m + 0.5) / shells;

    // slope fit of log max|fhat| against log(1+r^2) over the usable band:
    // skip the innermost shells and anything at the numerical floor
    const double floor_level = std::abs(report.fhat_origin) * 1e-12;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int m = 4; m < shells; ++m) {
        if (report.shell_maxima[m] <= floor_level) continue;
        const double lx = std::log(1.0 + report.shell_radii[m] * report.shell_radii[m]);
        const double ly = std::log(report.shell_maxima[m]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++count;
    }
    if (count >= 2) {
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        report.fitted_exponent = -slope;
        report.fitted_n = static_cast<int>(std::floor(report.fitted_exponent));
    }

    report.bound_constants.clear();
    for (int n = 1; n <= 3; ++n) {
        double c = 0.0;
        for (int a = 0; a < n_xi; ++a)
            for (int b = 0; b < n_k; ++b) {
                const double r2 = xi[a] * xi[a] + kk[b] * kk[b];
                c = std::max(c, std::abs(fhat[static_cast<std::size_t>(a) * n_k + b]) *
                                    std::pow(1.0 + r2, n));
            }
        report.bound_constants.push_back(c);
    }
    return report;
}

LargeMassReport large_mass_comparison(const StationaryResult& result) {
    const VelocityGrid& vg = result.f.vgrid();
    const SpatialGrid& xg = result.f.xgrid();
    LargeMassReport report;

    std::vector<double> marginal(vg.size(), 0.0);
    for (int j = 0; j < vg.size(); ++j) {
        double acc = 0.0;
        for (int i = 0; i < xg.size(); ++i) acc += xg.weight(i) * result.f(i, j);
        marginal[j] = acc;
    }
    double mass = 0.0;
    for (int j = 0; j < vg.size(); ++j) mass += vg.weight(j) * marginal[j];

    double l1 = 0.0;
    for (int j = 0; j < vg.size(); ++j) {
        const double target = 0.5 * std::exp(-std::abs(vg.node(j)));
        l1 += vg.weight(j) * std::abs(marginal[j] / mass - target);
    }
    report.marginal_l1 = l1;

    const double M = result.mass;
    report.rescaled_a20 = result.moments.at(2, 0) / M;
    report.rescaled_a02 = result.moments.at(0, 2) / M;
    report.a20_target = 2.0 / (M - 2.0);
    report.a02_target = 2.0 * M / (M - 2.0);
    return report;
}

} // namespace kinchem
