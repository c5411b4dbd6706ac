#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "polya/errors.hpp"

namespace polya::num {

/// Principal real branch W0 of Lambert's W: returns w >= -1 with
/// w * e^w = z, for z >= -1/e. Residual |w e^w - z| <= 1e-12 * max(1, |z|).
double lambert_w0(double z);

/// Tree function T(z) = -W0(-z), defined for z <= 1/e.
double tree_function(double z);

/// Dense e^{M t} by scaling and squaring with a truncated Taylor core.
/// Intended for small matrices (c <= 16).
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& m, double t);

/// Rising factorial x(x+1)...(x+ell-1); empty product is 1.
double rising_factorial(double x, int ell);

/// 2F1(mu, 1; 2; z) via its elementary closed form
/// (1 - (1-z)^{1-mu}) / ((1-mu) z), with the mu -> 1 and z -> 0 limits.
double hyp2f1_special(double mu, double z);

struct OdeSolution {
    std::vector<double> grid;                 // snapshot times, grid.front() == 0
    std::vector<Eigen::VectorXd> values;      // state at each snapshot time
    double step_size_used = 0.0;
    bool truncation_warning = false;          // kolmogorov solver only
    double mass_deficit = 0.0;                // kolmogorov solver only

    const Eigen::VectorXd& endpoint() const { return values.back(); }
};

/// Fixed-step RK4 on the pure-birth forward system
///   P'_0       = -i P_0
///   P'_ell     = (i+(ell-1)delta) P_{ell-1} - (i+ell delta) P_ell
/// truncated at ell_max. The coupling is one-way (upward), so components
/// ell <= ell_max are unaffected by the truncation; only the mass that has
/// flowed past ell_max is missing, and it is reported as mass_deficit.
OdeSolution ode_solve_kolmogorov(double i, double delta, int ell_max, double t_end);

/// Fixed-step RK4 on x' = E[A]^T x starting from init.
OdeSolution ode_solve_mean(const Eigen::MatrixXd& mean_matrix, const Eigen::VectorXd& init,
                           double t_end);

/// Fixed-step RK4 on the cascaded second-moment system of the balanced
/// triangular scheme (states E[X^2], E[XY], E[Y^2]; the exact means enter
/// as known forcing terms).
OdeSolution ode_second_moments_triangular(double alpha, double delta, double x0, double y0,
                                          double t_end);

using MgfEvaluator = std::function<double(double t, const Eigen::VectorXd& u)>;
using RowMgfEvaluator = std::function<double(const Eigen::VectorXd& u)>;

struct PdeResidual {
    double residual;  // d(phi)/dt + sum_i (1 - psi_i) d(phi)/du_i
    double dominant;  // magnitude of the largest single term, for relative assessment
    double relative() const { return dominant > 0.0 ? std::abs(residual) / dominant : std::abs(residual); }
};

/// Central-difference residual of the governing transport equation at one
/// interior point. Throws DomainError if any stencil point leaves the
/// evaluator's domain.
PdeResidual pde_residual(const MgfEvaluator& phi, const std::vector<RowMgfEvaluator>& psis,
                         double t, const Eigen::VectorXd& u, double h = 1e-5);

}  // namespace polya::num
