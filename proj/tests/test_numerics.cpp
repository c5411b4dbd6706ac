#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polya/analytic.hpp"
#include "polya/numerics.hpp"
#include "polya/rng.hpp"

using namespace polya;

TEST_CASE("lambert_w0 fixed points") {
    CHECK(num::lambert_w0(0.0) == 0.0);
    CHECK(num::lambert_w0(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(num::lambert_w0(1.0) == doctest::Approx(0.5671432904097838).epsilon(1e-14));
    CHECK(num::lambert_w0(10.0) == doctest::Approx(1.7455280027406994).epsilon(1e-14));
    CHECK(num::lambert_w0(-std::exp(-1.0)) == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK_THROWS_AS(num::lambert_w0(-0.37), DomainError);
}

TEST_CASE("lambert_w0 identity on a grid") {
    const double inv_e = std::exp(-1.0);
    for (int k = 0; k < 400; ++k) {
        const double offset = 1e-12 * std::pow(inv_e / 1e-12, k / 399.0);
        const double z = -inv_e + offset;
        const double w = num::lambert_w0(z);
        CHECK(std::abs(w * std::exp(w) - z) <= 1e-12 * std::max(1.0, std::abs(z)));
    }
    for (int k = 0; k < 400; ++k) {
        const double z = 1e-10 * std::pow(1e16, k / 399.0);
        const double w = num::lambert_w0(z);
        CHECK(std::abs(w * std::exp(w) - z) <= 1e-12 * std::max(1.0, std::abs(z)));
    }
}

TEST_CASE("tree function") {
    CHECK(num::tree_function(0.0) == 0.0);
    CHECK(num::tree_function(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-7));
    // series oracle at z = 0.2
    CHECK(num::tree_function(0.2) ==
          doctest::Approx(oracles::tree_series(0.2)).epsilon(1e-10));
    // inverse identity T(u e^{-u}) = u for u <= 1
    for (double u : {0.1, 0.3, 0.5, 0.8, 1.0}) {
        CHECK(num::tree_function(u * std::exp(-u)) == doctest::Approx(u).epsilon(1e-10));
    }
    // identity T(z) e^{-T(z)} = z
    const double z = 0.31;
    const double tz = num::tree_function(z);
    CHECK(tz * std::exp(-tz) == doctest::Approx(z).epsilon(1e-13));
    CHECK_THROWS_AS(num::tree_function(0.4), DomainError);
}

TEST_CASE("matrix_exp basics") {
    Eigen::MatrixXd m(2, 2);
    m << 0.7, -0.3, 0.2, 1.1;
    CHECK(num::matrix_exp(m, 0.0).isIdentity(0.0));

    Eigen::MatrixXd d = Eigen::Vector2d(0.5, -1.25).asDiagonal();
    const Eigen::MatrixXd ed = num::matrix_exp(d, 2.0);
    CHECK(ed(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(ed(1, 1) == doctest::Approx(std::exp(-2.5)).epsilon(1e-14));
    CHECK(ed(0, 1) == 0.0);
}

TEST_CASE("matrix_exp of the exchange generator against its eigendecomposition") {
    Eigen::MatrixXd m(2, 2);
    m << -1.0, 1.0, 1.0, -1.0;
    const Eigen::MatrixXd got = num::matrix_exp(m, 1.0);
    const Eigen::MatrixXd want = oracles::exchange_generator_exp(1.0, 1.0);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(got(0, 0) == doctest::Approx(0.5 * (1.0 + std::exp(-2.0))).epsilon(1e-14));
    CHECK(got(0, 1) == doctest::Approx(0.5 * (1.0 - std::exp(-2.0))).epsilon(1e-14));
}

TEST_CASE("matrix_exp against the plain series oracle") {
    RandomStream rng(99);
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::MatrixXd m(3, 3);
        for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = 2.0 * rng.uniform_open01() - 1.0;
        const double t = 0.5 + rng.uniform_open01();
        const Eigen::MatrixXd fast = num::matrix_exp(m, t);
        const Eigen::MatrixXd slow = oracles::matexp_series(m, t);
        const double scale = std::max(1.0, slow.cwiseAbs().maxCoeff());
        CHECK((fast - slow).cwiseAbs().maxCoeff() / scale < 1e-12);
    }
}

TEST_CASE("rising factorial") {
    CHECK(num::rising_factorial(3.7, 0) == 1.0);
    CHECK(num::rising_factorial(1.0, 5) == 120.0);
    CHECK(num::rising_factorial(2.5, 3) == 39.375);
}

TEST_CASE("hyp2f1_special") {
    CHECK(num::hyp2f1_special(0.5, 0.75) == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(num::hyp2f1_special(0.4, 1e-10) == doctest::Approx(1.0).epsilon(1e-9));
    for (double z : {-0.8, -0.3, 0.3, 0.8})
        CHECK(num::hyp2f1_special(0.0, z) == doctest::Approx(1.0).epsilon(1e-14));
    for (double mu : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double z : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9}) {
            const double want = oracles::hyp2f1_series(mu, z);
            CHECK(num::hyp2f1_special(mu, z) == doctest::Approx(want).epsilon(1e-10));
        }
    // the mu -> 1 limit joins the series continuously
    CHECK(num::hyp2f1_special(1.0 + 1e-12, 0.5) ==
          doctest::Approx(oracles::hyp2f1_series(1.0, 0.5)).epsilon(1e-7));
    CHECK_THROWS_AS(num::hyp2f1_special(0.5, 1.0), DomainError);
}

TEST_CASE("kolmogorov ODE solver against the closed form") {
    SUBCASE("degenerate end time") {
        const num::OdeSolution sol = num::ode_solve_kolmogorov(2.0, 1.0, 10, 0.0);
        CHECK(sol.endpoint()[0] == 1.0);
        CHECK(sol.endpoint().tail(10).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("moderate case is mass-complete") {
        const num::OdeSolution sol = num::ode_solve_kolmogorov(2.0, 1.0, 60, 1.0);
        CHECK(sol.endpoint()[1] ==
              doctest::Approx(2.0 * std::exp(-2.0) * (1.0 - std::exp(-1.0))).epsilon(1e-8));
        CHECK(sol.mass_deficit < 1e-8);
        CHECK_FALSE(sol.truncation_warning);
        CHECK(sol.endpoint().minCoeff() > -1e-10);
        for (int l = 0; l <= 60; ++l)
            CHECK(sol.endpoint()[l] ==
                  doctest::Approx(analytic::kolmogorov_prob(2.0, 1.0, l, 1.0)).epsilon(1e-8));
    }
    SUBCASE("tight truncation is flagged but low components stay exact") {
        const num::OdeSolution sol = num::ode_solve_kolmogorov(2.0, 1.0, 3, 2.0);
        CHECK(sol.truncation_warning);
        CHECK(sol.mass_deficit > 1e-3);
        // upward one-way coupling: truncation cannot disturb ell < ell_max
        for (int l = 0; l <= 2; ++l)
            CHECK(sol.endpoint()[l] ==
                  doctest::Approx(analytic::kolmogorov_prob(2.0, 1.0, l, 2.0)).epsilon(1e-8));
    }
}

TEST_CASE("mean ODE solver") {
    SUBCASE("zero matrix keeps the state constant") {
        const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 2);
        const num::OdeSolution sol = num::ode_solve_mean(z, Eigen::Vector2d(3.0, 5.0), 2.0);
        CHECK(sol.endpoint()[0] == 3.0);
        CHECK(sol.endpoint()[1] == 5.0);
        CHECK(sol.values.front()[0] == 3.0);
    }
    SUBCASE("scalar exponential growth") {
        Eigen::MatrixXd one(1, 1);
        one << 1.0;
        Eigen::VectorXd x0(1);
        x0 << 1.0;
        const num::OdeSolution sol = num::ode_solve_mean(one, x0, 1.0);
        CHECK(sol.endpoint()[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-10));
    }
    SUBCASE("exchange system relaxes to the average") {
        Eigen::MatrixXd m(2, 2);
        m << -1.0, 1.0, 1.0, -1.0;
        const num::OdeSolution sol = num::ode_solve_mean(m, Eigen::Vector2d(3.0, 5.0), 2.0);
        CHECK(sol.endpoint()[0] == doctest::Approx(4.0 - std::exp(-4.0)).epsilon(1e-9));
        CHECK(sol.endpoint()[1] == doctest::Approx(4.0 + std::exp(-4.0)).epsilon(1e-9));
    }
}

TEST_CASE("triangular second-moment ODE oracle") {
    SUBCASE("initial conditions") {
        const num::OdeSolution sol = num::ode_second_moments_triangular(1.0, 2.0, 1.5, 2.5, 0.0);
        CHECK(sol.endpoint()[0] == 1.5 * 1.5);
        CHECK(sol.endpoint()[1] == 1.5 * 2.5);
        CHECK(sol.endpoint()[2] == 2.5 * 2.5);
    }
    SUBCASE("endpoint matches the closed forms") {
        const double e1 = std::exp(1.0), e2 = std::exp(2.0);
        const num::OdeSolution sol = num::ode_second_moments_triangular(1.0, 2.0, 1.0, 1.0, 1.0);
        CHECK(sol.endpoint()[0] == doctest::Approx(2.0 * e2 - e1).epsilon(1e-7));
        // reference values computed with 40-digit arithmetic
        CHECK(sol.endpoint()[1] == doctest::Approx(45.47849857170170).epsilon(1e-7));
        CHECK(sol.endpoint()[2] == doctest::Approx(304.2121483566257).epsilon(1e-7));
    }
    SUBCASE("random draws against moments_triangular") {
        RandomStream rng(7);
        for (int rep = 0; rep < 10; ++rep) {
            const double a = 0.3 + 1.5 * rng.uniform_open01();
            const double d = a + 0.2 + (std::min(3.0, a + 2.0) - a - 0.2) * rng.uniform_open01();
            const double x0 = 0.5 + 2.0 * rng.uniform_open01();
            const double y0 = 0.5 + 2.0 * rng.uniform_open01();
            const double t = 0.2 + 1.8 * rng.uniform_open01();
            const Eigen::VectorXd got =
                num::ode_second_moments_triangular(a, d, x0, y0, t).endpoint();
            const Eigen::MatrixXd want =
                *analytic::moments_triangular(a, d, x0, y0, t).second_moments;
            CHECK(got[0] == doctest::Approx(want(0, 0)).epsilon(1e-7));
            CHECK(got[1] == doctest::Approx(want(0, 1)).epsilon(1e-7));
            CHECK(got[2] == doctest::Approx(want(1, 1)).epsilon(1e-7));
        }
    }
}

namespace {

Eigen::VectorXd vec1(double u) {
    Eigen::VectorXd v(1);
    v << u;
    return v;
}

}  // namespace

TEST_CASE("pde residual checker") {
    const std::vector<num::RowMgfEvaluator> psi_const = {
        [](const Eigen::VectorXd& u) { return std::exp(u[0]); }};

    SUBCASE("constant function has exactly zero residual") {
        const num::MgfEvaluator one = [](double, const Eigen::VectorXd&) { return 1.0; };
        const num::PdeResidual r = num::pde_residual(one, psi_const, 0.5, vec1(0.1), 1e-5);
        CHECK(r.residual == 0.0);
    }
    SUBCASE("the closed form solves its transport equation") {
        const num::MgfEvaluator phi = [](double t, const Eigen::VectorXd& u) {
            return analytic::mgf_diag_constant(1.0, 1.0, t, u[0]);
        };
        const num::PdeResidual r = num::pde_residual(phi, psi_const, 0.5, vec1(0.1), 1e-5);
        CHECK(r.relative() <= 1e-6);
    }
    SUBCASE("a perturbed function is detected") {
        const num::MgfEvaluator bad = [](double t, const Eigen::VectorXd& u) {
            return analytic::mgf_diag_constant(1.0, 1.0, t, u[0]) * (1.0 + 0.01 * u[0]);
        };
        const num::PdeResidual r = num::pde_residual(bad, psi_const, 0.5, vec1(0.1), 1e-5);
        CHECK(r.relative() > 1e-3);
        CHECK(r.relative() < 1e-1);
    }
    SUBCASE("second-order stencil: halving h quarters the residual") {
        const num::MgfEvaluator phi = [](double t, const Eigen::VectorXd& u) {
            return analytic::mgf_diag_constant(1.0, 1.0, t, u[0]);
        };
        const double r1 =
            std::abs(num::pde_residual(phi, psi_const, 0.5, vec1(0.1), 1e-2).residual);
        const double r2 =
            std::abs(num::pde_residual(phi, psi_const, 0.5, vec1(0.1), 5e-3).residual);
        CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.2));
    }
    SUBCASE("stencil leaving the domain raises") {
        const num::MgfEvaluator phi = [](double t, const Eigen::VectorXd& u) {
            return analytic::mgf_diag_constant(1.0, 1.0, t, u[0]);
        };
        // u chosen so the base is barely positive; the +h stencil crosses zero
        const double u_edge = -std::log1p(-std::exp(-3.0) * 0.999999);
        CHECK_THROWS_AS(num::pde_residual(phi, psi_const, 3.0, vec1(u_edge), 1e-4), DomainError);
    }
}
