#include "polya/numerics.hpp"

#include <cmath>
#include <string>

namespace polya::num {

namespace {

constexpr double kInvE = 0.36787944117144232;  // 1/e rounded to double

// Series around the branch point z = -1/e, in p = sqrt(2(1 + e z)).
double branch_series(double z) {
    double s = 2.0 * (1.0 + std::exp(1.0) * z);
    if (s < 0.0) s = 0.0;
    double p = std::sqrt(s);
    return -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 - p * 43.0 / 540.0)));
}

double initial_guess(double z) {
    if (z < -0.3) return branch_series(z);
    if (z < 0.5) {
        // Taylor of W0 at the origin; adequate to start Halley.
        return z * (1.0 + z * (-1.0 + z * (1.5 - z * 8.0 / 3.0)));
    }
    if (z < 3.0) return std::log1p(z) * 0.75;
    double l1 = std::log(z);
    double l2 = std::log(l1);
    return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w0(double z) {
    if (z < -kInvE) {
        // Absorb rounding noise immediately below the branch point.
        if (z > -kInvE - 1e-15) {
            z = -kInvE;
        } else {
            throw DomainError("lambert_w0: argument " + std::to_string(z) + " below -1/e");
        }
    }
    if (z == 0.0) return 0.0;

    double w = initial_guess(z);
    const double tol = 1e-14 * std::max(1.0, std::abs(z));
    for (int it = 0; it < 60; ++it) {
        double ew = std::exp(w);
        double f = w * ew - z;
        if (std::abs(f) <= tol) break;
        double wp1 = w + 1.0;
        if (std::abs(wp1) < 1e-9) {
            // Halley degenerates at the branch point; the series is already
            // accurate there and the tiny slope keeps the residual in spec.
            w = branch_series(z);
            break;
        }
        // Halley step.
        double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        double dw = f / denom;
        w -= dw;
        if (std::abs(dw) <= 1e-16 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

double tree_function(double z) {
    if (z > kInvE) {
        if (z < kInvE + 1e-15) {
            z = kInvE;
        } else {
            throw DomainError("tree_function: argument " + std::to_string(z) + " above 1/e");
        }
    }
    return -lambert_w0(-z);
}

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& m, double t) {
    const Eigen::Index c = m.rows();
    if (m.cols() != c) throw DomainError("matrix_exp: matrix must be square");
    Eigen::MatrixXd a = m * t;

    double norm = a.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    int squarings = 0;
    if (norm > 0.25) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
        a /= std::pow(2.0, squarings);
    }

    // Taylor core; ||a|| <= 0.25 so 18 terms reach well below double epsilon.
    Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(c, c);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(c, c);
    for (int k = 1; k <= 18; ++k) {
        term = (term * a) / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

double rising_factorial(double x, int ell) {
    double p = 1.0;
    for (int k = 0; k < ell; ++k) p *= x + static_cast<double>(k);
    return p;
}

double hyp2f1_special(double mu, double z) {
    if (z >= 1.0) throw DomainError("hyp2f1_special: argument z must be < 1");
    if (std::abs(z) < 1e-8) return 1.0 + mu * z / 2.0;
    if (std::abs(mu - 1.0) < 1e-8) return -std::log1p(-z) / z;
    return (1.0 - std::pow(1.0 - z, 1.0 - mu)) / ((1.0 - mu) * z);
}

namespace {

// Classical RK4 with fixed step; snapshots are thinned to at most
// max_snapshots rows but always include t = 0 and t = t_end.
template <typename Deriv>
OdeSolution rk4_solve(const Eigen::VectorXd& y0, double t_end, double h_target, Deriv f,
                      int max_snapshots = 1001) {
    OdeSolution out;
    if (t_end < 0.0) throw DomainError("ode solver: negative end time");
    if (t_end == 0.0) {
        out.grid = {0.0};
        out.values = {y0};
        return out;
    }
    const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(t_end / h_target)));
    const double h = t_end / static_cast<double>(n_steps);
    const long stride = std::max<long>(1, (n_steps + max_snapshots - 1) / max_snapshots);

    Eigen::VectorXd y = y0;
    Eigen::VectorXd k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());

    out.step_size_used = h;
    out.grid.push_back(0.0);
    out.values.push_back(y);
    for (long s = 0; s < n_steps; ++s) {
        const double t = h * static_cast<double>(s);
        f(t, y, k1);
        tmp = y + (h / 2.0) * k1;
        f(t + h / 2.0, tmp, k2);
        tmp = y + (h / 2.0) * k2;
        f(t + h / 2.0, tmp, k3);
        tmp = y + h * k3;
        f(t + h, tmp, k4);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((s + 1) % stride == 0 || s + 1 == n_steps) {
            out.grid.push_back(s + 1 == n_steps ? t_end : h * static_cast<double>(s + 1));
            out.values.push_back(y);
        }
    }
    return out;
}

}  // namespace

OdeSolution ode_solve_kolmogorov(double i, double delta, int ell_max, double t_end) {
    if (!(i > 0.0)) throw DomainError("ode_solve_kolmogorov: i must be positive");
    if (!(delta > 0.0)) throw DomainError("ode_solve_kolmogorov: delta must be positive");
    if (ell_max < 0) throw DomainError("ode_solve_kolmogorov: ell_max must be >= 0");

    const double max_rate = i + static_cast<double>(ell_max) * delta;
    // Stiffer than the stability limit demands: the fixed step must hold the
    // global error below 1e-8 in absolute terms across all components.
    const double h_target = std::min(1e-3, 0.008 / max_rate);

    Eigen::VectorXd p0 = Eigen::VectorXd::Zero(ell_max + 1);
    p0[0] = 1.0;
    auto deriv = [i, delta, ell_max](double, const Eigen::VectorXd& p, Eigen::VectorXd& out) {
        out[0] = -i * p[0];
        for (int l = 1; l <= ell_max; ++l) {
            const double a_prev = i + static_cast<double>(l - 1) * delta;
            const double a_cur = i + static_cast<double>(l) * delta;
            out[l] = a_prev * p[l - 1] - a_cur * p[l];
        }
    };
    OdeSolution sol = rk4_solve(p0, t_end, h_target, deriv);
    sol.mass_deficit = 1.0 - sol.values.back().sum();
    sol.truncation_warning = sol.mass_deficit > 1e-8;
    return sol;
}

OdeSolution ode_solve_mean(const Eigen::MatrixXd& mean_matrix, const Eigen::VectorXd& init,
                           double t_end) {
    const Eigen::MatrixXd mt = mean_matrix.transpose();
    const double norm = std::max(1.0, mt.cwiseAbs().rowwise().sum().maxCoeff());
    const double h_target = std::min(1e-3, 1e-3 / norm);
    auto deriv = [&mt](double, const Eigen::VectorXd& x, Eigen::VectorXd& out) { out = mt * x; };
    return rk4_solve(init, t_end, h_target, deriv);
}

OdeSolution ode_second_moments_triangular(double alpha, double delta, double x0, double y0,
                                          double t_end) {
    if (!(alpha > 0.0 && alpha < delta))
        throw DomainError("ode_second_moments_triangular: requires 0 < alpha < delta");
    const double beta = delta - alpha;
    const double s0 = x0 + y0;
    // Exact means enter as known forcing terms.
    auto mean_x = [=](double t) { return x0 * std::exp(alpha * t); };
    auto mean_y = [=](double t) { return s0 * std::exp(delta * t) - x0 * std::exp(alpha * t); };

    Eigen::VectorXd y0v(3);
    y0v << x0 * x0, x0 * y0, y0 * y0;  // E[X^2], E[XY], E[Y^2] at time 0
    auto deriv = [=](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
        const double ex = mean_x(t);
        const double ey = mean_y(t);
        out[0] = 2.0 * alpha * y[0] + alpha * alpha * ex;
        out[1] = (alpha + delta) * y[1] + beta * y[0] + alpha * beta * ex;
        out[2] = 2.0 * delta * y[2] + 2.0 * beta * y[1] + beta * beta * ex + delta * delta * ey;
    };
    const double h_target = std::min(1e-3, 5e-4 / std::max(1.0, delta));
    return rk4_solve(y0v, t_end, h_target, deriv);
}

PdeResidual pde_residual(const MgfEvaluator& phi, const std::vector<RowMgfEvaluator>& psis,
                         double t, const Eigen::VectorXd& u, double h) {
    const Eigen::Index c = u.size();
    if (static_cast<Eigen::Index>(psis.size()) != c)
        throw DomainError("pde_residual: one psi per coordinate required");

    const double dphi_dt = (phi(t + h, u) - phi(t - h, u)) / (2.0 * h);
    double residual = dphi_dt;
    double dominant = std::abs(dphi_dt);
    Eigen::VectorXd up = u, um = u;
    for (Eigen::Index idx = 0; idx < c; ++idx) {
        up[idx] = u[idx] + h;
        um[idx] = u[idx] - h;
        const double dphi_du = (phi(t, up) - phi(t, um)) / (2.0 * h);
        up[idx] = u[idx];
        um[idx] = u[idx];
        const double term = (1.0 - psis[idx](u)) * dphi_du;
        residual += term;
        dominant = std::max(dominant, std::abs(term));
    }
    return {residual, dominant};
}

}  // namespace polya::num
