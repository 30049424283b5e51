#include "ftecdi/calibrate.hpp"

#include "ftecdi/dynamics.hpp"
#include "ftecdi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ftecdi {

std::vector<std::string> EquilibriumDataset::violations() const
{
    std::vector<std::string> out;
    if (rows.size() < 3) {
        out.push_back("need at least 3 rows to fit 3 parameters");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string at = "row " + std::to_string(i + 1) + ": ";
        if (!(r.v_ch > 0.0)) out.push_back(at + "V_ch must be positive");
        if (!(r.c_feed > 0.0)) out.push_back(at + "c_feed must be positive");
        if (!(r.weight >= 0.0)) out.push_back(at + "weight must be non-negative");
        if (!std::isfinite(r.charge) || !std::isfinite(r.eq_sac)) out.push_back(at + "non-finite data");
    }
    return out;
}

CellParams ElectrodeFit::apply(CellParams base) const
{
    base.edl.micropore_volume = micropore_volume;
    base.edl.attraction_energy = attraction_energy;
    base.edl.stern_capacitance = stern_capacitance;
    return base;
}

bool FitBounds::contains(const ElectrodeFit& p) const
{
    const auto v = p.as_array();
    const auto lo = lower.as_array();
    const auto hi = upper.as_array();
    for (std::size_t k = 0; k < 3; ++k) {
        if (!(v[k] >= lo[k] && v[k] <= hi[k])) {
            return false;
        }
    }
    return true;
}

namespace {

double rms(const std::vector<EquilibriumRow>& rows, double EquilibriumRow::*field)
{
    double sum = 0.0;
    for (const auto& r : rows) {
        sum += r.*field * r.*field;
    }
    const double v = std::sqrt(sum / static_cast<double>(rows.size()));
    return v > 0.0 ? v : 1.0;
}

constexpr double failure_penalty = 1e12;

} // namespace

std::vector<double> fit_residuals(const CellParams& base, const EquilibriumDataset& data,
                                  const ElectrodeFit& fit)
{
    const CellParams params = fit.apply(base);
    const double scale_q = rms(data.rows, &EquilibriumRow::charge);
    const double scale_s = rms(data.rows, &EquilibriumRow::eq_sac);
    std::vector<double> out;
    out.reserve(2 * data.rows.size());
    for (const auto& row : data.rows) {
        const auto eq = solve_equilibrium(params, row.v_ch, row.c_feed);
        const double w = std::sqrt(row.weight);
        out.push_back(w * (eq.charge - row.charge) / scale_q);
        out.push_back(w * (eq.eq_sac - row.eq_sac) / scale_s);
    }
    return out;
}

double fit_objective(const CellParams& base, const EquilibriumDataset& data, const ElectrodeFit& fit)
{
    try {
        const auto r = fit_residuals(base, data, fit);
        return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    } catch (const SolverError&) {
        return failure_penalty;
    } catch (const ConfigError&) {
        return failure_penalty;
    }
}

FitResult fit_equilibrium(const CellParams& base, const EquilibriumDataset& data,
                          const ElectrodeFit& initial, const FitBounds& bounds,
                          const FitOptions& options)
{
    if (const auto v = data.violations(); !v.empty()) {
        std::string msg = "invalid dataset:";
        for (const auto& m : v) msg += "\n  - " + m;
        throw ConfigError(msg);
    }
    if (!bounds.contains(initial)) {
        throw ConfigError("initial fit parameters lie outside the bounds");
    }

    using Point = std::array<double, 3>;
    const Point lo = bounds.lower.as_array();
    const Point hi = bounds.upper.as_array();
    auto to_params = [&](const Point& u) {
        Point x;
        for (std::size_t k = 0; k < 3; ++k) {
            x[k] = lo[k] + std::clamp(u[k], 0.0, 1.0) * (hi[k] - lo[k]);
        }
        return ElectrodeFit::from_array(x);
    };
    int evaluations = 0;
    auto objective = [&](const Point& u) {
        ++evaluations;
        double outside = 0.0;
        for (double uk : u) {
            const double d = uk < 0.0 ? -uk : (uk > 1.0 ? uk - 1.0 : 0.0);
            outside += d * d;
        }
        return fit_objective(base, data, to_params(u)) + 1e6 * outside;
    };

    Point best;
    {
        const Point x0 = initial.as_array();
        for (std::size_t k = 0; k < 3; ++k) {
            best[k] = (x0[k] - lo[k]) / (hi[k] - lo[k]);
        }
    }
    double best_f = objective(best);
    const double f_initial = best_f;
    bool converged = false;

    // Nelder-Mead with standard coefficients, restarted from the best vertex.
    for (int run = 0; run <= options.restarts; ++run) {
        const double edge = run == 0 ? 0.1 : 0.02;
        std::array<Point, 4> simplex;
        std::array<double, 4> values;
        simplex[0] = best;
        values[0] = best_f;
        for (std::size_t k = 0; k < 3; ++k) {
            Point p = best;
            p[k] += p[k] + edge <= 1.0 ? edge : -edge;
            simplex[k + 1] = p;
            values[k + 1] = objective(p);
        }
        const int budget_end = evaluations + options.max_evaluations;
        converged = false;
        while (evaluations < budget_end) {
            std::array<std::size_t, 4> order{0, 1, 2, 3};
            std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
            std::array<Point, 4> s;
            std::array<double, 4> f;
            for (std::size_t k = 0; k < 4; ++k) {
                s[k] = simplex[order[k]];
                f[k] = values[order[k]];
            }
            simplex = s;
            values = f;

            double size = 0.0;
            for (std::size_t k = 1; k < 4; ++k) {
                for (std::size_t d = 0; d < 3; ++d) {
                    size = std::max(size, std::abs(simplex[k][d] - simplex[0][d]));
                }
            }
            if (values[3] - values[0] <= options.f_tol || size <= options.x_tol) {
                converged = true;
                break;
            }

            Point centroid{0.0, 0.0, 0.0};
            for (std::size_t k = 0; k < 3; ++k) {
                for (std::size_t d = 0; d < 3; ++d) {
                    centroid[d] += simplex[k][d] / 3.0;
                }
            }
            auto along = [&](double t) {
                Point p;
                for (std::size_t d = 0; d < 3; ++d) {
                    p[d] = centroid[d] + t * (simplex[3][d] - centroid[d]);
                }
                return p;
            };
            const Point reflected = along(-1.0);
            const double fr = objective(reflected);
            if (fr < values[0]) {
                const Point expanded = along(-2.0);
                const double fe = objective(expanded);
                if (fe < fr) {
                    simplex[3] = expanded;
                    values[3] = fe;
                } else {
                    simplex[3] = reflected;
                    values[3] = fr;
                }
            } else if (fr < values[2]) {
                simplex[3] = reflected;
                values[3] = fr;
            } else {
                const bool outside = fr < values[3];
                const Point contracted = along(outside ? -0.5 : 0.5);
                const double fc = objective(contracted);
                if (fc < std::min(fr, values[3])) {
                    simplex[3] = contracted;
                    values[3] = fc;
                } else {
                    for (std::size_t k = 1; k < 4; ++k) {
                        for (std::size_t d = 0; d < 3; ++d) {
                            simplex[k][d] = simplex[0][d] + 0.5 * (simplex[k][d] - simplex[0][d]);
                        }
                        values[k] = objective(simplex[k]);
                    }
                }
            }
        }
        const auto it = std::min_element(values.begin(), values.end());
        if (*it < best_f) {
            best_f = *it;
            best = simplex[static_cast<std::size_t>(it - values.begin())];
        }
    }

    FitResult out;
    out.params = to_params(best);
    out.objective = fit_objective(base, data, out.params);
    if (out.objective > f_initial) {
        out.params = initial;
        out.objective = f_initial;
    }
    try {
        out.row_residuals = fit_residuals(base, data, out.params);
    } catch (const std::exception&) {
        out.row_residuals.clear();
    }
    out.residual_norm = std::sqrt(out.objective);
    out.converged = converged;
    out.evaluations = evaluations;
    return out;
}

Eigen::Matrix3d gauss_newton_hessian(const CellParams& base, const EquilibriumDataset& data,
                                     const ElectrodeFit& at)
{
    const auto x0 = at.as_array();
    const auto r0 = fit_residuals(base, data, at);
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(r0.size()), 3);
    for (std::size_t k = 0; k < 3; ++k) {
        const double h = 1e-6;
        auto xp = x0;
        auto xm = x0;
        const double scale = x0[k] != 0.0 ? std::abs(x0[k]) : 1.0;
        xp[k] += h * scale;
        xm[k] -= h * scale;
        const auto rp = fit_residuals(base, data, ElectrodeFit::from_array(xp));
        const auto rm = fit_residuals(base, data, ElectrodeFit::from_array(xm));
        for (std::size_t i = 0; i < r0.size(); ++i) {
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (rp[i] - rm[i]) / (2.0 * h);
        }
    }
    return jac.transpose() * jac;
}

} // namespace ftecdi
