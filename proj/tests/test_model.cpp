#include <doctest.h>

#include <cmath>

#include "polya/model.hpp"

using namespace polya;
using model::EntrySpec;
using model::NavigationMatrix;

namespace {

NavigationMatrix constants2(double a, double b, double c, double d) {
    return NavigationMatrix(2, {EntrySpec::constant(a), EntrySpec::constant(b),
                                EntrySpec::constant(c), EntrySpec::constant(d)});
}

model::InitialState init2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return {v};
}

}  // namespace

TEST_CASE("entry spec") {
    const EntrySpec c = EntrySpec::constant(-2.5);
    CHECK(c.mean() == -2.5);
    CHECK(c.mgf(0.0) == 1.0);
    CHECK(c.mgf(2.0) == doctest::Approx(std::exp(-5.0)));
    CHECK(c.mgf_defined(1e9));

    const EntrySpec e = EntrySpec::exponential(4.0);
    CHECK(e.mean() == 0.25);
    CHECK(e.mgf(0.0) == 1.0);
    CHECK(e.mgf(1.0) == doctest::Approx(4.0 / 3.0));
    CHECK_FALSE(e.mgf_defined(4.0));
    CHECK_THROWS_AS(e.mgf(5.0), DomainError);
    CHECK_THROWS_AS(EntrySpec::exponential(0.0), DomainError);
    CHECK_THROWS_AS(EntrySpec::exponential(-1.0), DomainError);
}

TEST_CASE("classify named patterns") {
    CHECK(std::holds_alternative<model::DiagonalConstantScheme>(
        model::classify(constants2(2.0, 0.0, 0.0, 3.0))));
    const auto dc =
        std::get<model::DiagonalConstantScheme>(model::classify(constants2(2.0, 0.0, 0.0, 3.0)));
    CHECK(dc.alphas[0] == 2.0);
    CHECK(dc.alphas[1] == 3.0);

    const auto eh =
        std::get<model::EhrenfestScheme>(model::classify(constants2(-1.0, 1.0, 1.0, -1.0)));
    CHECK(eh.gamma == 1.0);

    const auto hill =
        std::get<model::HillScheme>(model::classify(constants2(-1.5, -1.5, 1.5, 1.5)));
    CHECK(hill.gamma == 1.5);

    const auto bt =
        std::get<model::BalancedTriangularScheme>(model::classify(constants2(1.0, 1.0, 0.0, 2.0)));
    CHECK(bt.alpha == 1.0);
    CHECK(bt.delta == 2.0);

    NavigationMatrix diag_exp(2, {EntrySpec::exponential(1.0), EntrySpec::constant(0.0),
                                  EntrySpec::constant(0.0), EntrySpec::exponential(2.0)});
    const auto de = std::get<model::DiagonalExponentialScheme>(model::classify(diag_exp));
    CHECK(de.rates[0] == 1.0);
    CHECK(de.rates[1] == 2.0);

    NavigationMatrix one(1, {EntrySpec::constant(5.0)});
    CHECK(std::holds_alternative<model::DiagonalConstantScheme>(model::classify(one)));
}

TEST_CASE("classify falls back to general") {
    // negative diagonal entry
    CHECK(std::holds_alternative<model::GeneralScheme>(
        model::classify(constants2(2.0, 0.0, 0.0, -3.0))));
    // alpha = delta is not balanced-triangular; equals a diagonal scheme
    CHECK(std::holds_alternative<model::DiagonalConstantScheme>(
        model::classify(constants2(2.0, 0.0, 0.0, 2.0))));
    // mixed diagonal kinds
    NavigationMatrix mixed(2, {EntrySpec::exponential(1.0), EntrySpec::constant(0.0),
                               EntrySpec::constant(0.0), EntrySpec::constant(1.0)});
    CHECK(std::holds_alternative<model::GeneralScheme>(model::classify(mixed)));
    // triangular with alpha >= delta
    CHECK(std::holds_alternative<model::GeneralScheme>(
        model::classify(constants2(2.0, -1.0, 0.0, 1.0))));
}

TEST_CASE("classification reconstructs the canonical matrix exactly") {
    const NavigationMatrix cases[] = {
        constants2(2.0, 0.0, 0.0, 3.0),
        constants2(-0.7, 0.7, 0.7, -0.7),
        constants2(-1.5, -1.5, 1.5, 1.5),
        constants2(0.3, 1.9, 0.0, 2.2),
        NavigationMatrix(2, {EntrySpec::exponential(1.0), EntrySpec::constant(0.0),
                             EntrySpec::constant(0.0), EntrySpec::exponential(2.5)}),
    };
    for (const NavigationMatrix& m : cases) {
        const model::Scheme s = model::classify(m);
        CHECK(model::canonical_matrix(s) == m);
    }
    CHECK_THROWS_AS(model::canonical_matrix(model::Scheme{model::GeneralScheme{}}),
                    ValidationError);
}

TEST_CASE("tenability") {
    SUBCASE("ehrenfest integer lattice") {
        CHECK(model::check_tenability(constants2(-1, 1, 1, -1), init2(3, 5)).ok());
        const auto bad = model::check_tenability(constants2(-2, 2, 2, -2), init2(3, 4));
        CHECK(bad.status == model::TenabilityReport::Status::Violated);
        CHECK(bad.violations.size() == 1);  // 3/2 is not an integer; 4/2 is
    }
    SUBCASE("hill requires y above x") {
        const auto bad = model::check_tenability(constants2(-1, -1, 1, 1), init2(2, 1));
        CHECK(bad.status == model::TenabilityReport::Status::Violated);
        REQUIRE(bad.violations.size() == 1);
        CHECK(bad.violations[0] == "Y(0) > X(0) required");
        // property: OK if and only if y > x
        for (double x = 0.0; x <= 3.0; x += 0.5)
            for (double y = 0.0; y <= 3.0; y += 0.5) {
                if (x + y <= 0.0) continue;
                CHECK(model::check_tenability(constants2(-1, -1, 1, 1), init2(x, y)).ok() ==
                      (y > x));
            }
    }
    SUBCASE("diagonal schemes are tenable; general is unknown") {
        CHECK(model::check_tenability(constants2(2, 0, 0, 3), init2(1, 0)).ok());
        const auto unknown = model::check_tenability(constants2(1, 2, 3, -4), init2(1, 1));
        CHECK(unknown.status == model::TenabilityReport::Status::Unknown);
    }
    SUBCASE("negative initial coordinates are always violations") {
        const auto bad = model::check_tenability(constants2(2, 0, 0, 3), init2(-1, 2));
        CHECK(bad.status == model::TenabilityReport::Status::Violated);
    }
}

TEST_CASE("row mean matrix") {
    const NavigationMatrix m = constants2(-1.0, 2.0, 0.5, 3.0);
    CHECK(model::row_mean_matrix(m) == Eigen::MatrixXd{{-1.0, 2.0}, {0.5, 3.0}});

    NavigationMatrix diag_exp(2, {EntrySpec::exponential(1.0), EntrySpec::constant(0.0),
                                  EntrySpec::constant(0.0), EntrySpec::exponential(1.0)});
    CHECK(model::row_mean_matrix(diag_exp).isIdentity(0.0));

    NavigationMatrix e4(1, {EntrySpec::exponential(4.0)});
    CHECK(model::row_mean_matrix(e4)(0, 0) == 0.25);
}

TEST_CASE("row mgf") {
    const NavigationMatrix ehrenfest = constants2(-2.0, 2.0, 2.0, -2.0);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK(model::row_mgf(ehrenfest, 0, zero) == 1.0);
    CHECK(model::row_mgf(ehrenfest, 1, zero) == 1.0);

    Eigen::VectorXd uv(2);
    uv << 0.3, -0.2;
    CHECK(model::row_mgf(ehrenfest, 0, uv) ==
          doctest::Approx(std::exp(-2.0 * 0.3 + 2.0 * -0.2)).epsilon(1e-15));

    NavigationMatrix e1(1, {EntrySpec::exponential(1.0)});
    Eigen::VectorXd half(1);
    half << 0.5;
    CHECK(model::row_mgf(e1, 0, half) == 2.0);
    Eigen::VectorXd too_big(1);
    too_big << 1.0;
    CHECK_THROWS_AS(model::row_mgf(e1, 0, too_big), DomainError);

    // strictly increasing in each argument for nonnegative-valued entries
    NavigationMatrix pos(2, {EntrySpec::constant(2.0), EntrySpec::exponential(3.0),
                             EntrySpec::constant(0.0), EntrySpec::constant(1.0)});
    RandomStream rng(11);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::VectorXd u(2);
        u << 2.0 * rng.uniform_open01() - 1.0, 2.0 * rng.uniform_open01() - 1.0;
        const double base = model::row_mgf(pos, 0, u);
        for (int j = 0; j < 2; ++j) {
            Eigen::VectorXd up = u;
            up[j] += 0.05;
            CHECK(model::row_mgf(pos, 0, up) > base);
        }
    }
}

TEST_CASE("scenario validation") {
    model::ScenarioConfig config;
    config.matrix = constants2(-1, 1, 1, -1);
    config.init = init2(3, 5);
    config.horizon = 10.0;
    config.checkpoints = {1.0, 10.0};
    config.ensemble_size = 100;
    CHECK_NOTHROW(model::validate_scenario(config));

    SUBCASE("checkpoints must increase strictly") {
        config.checkpoints = {1.0, 1.0};
        CHECK_THROWS_AS(model::validate_scenario(config), ValidationError);
    }
    SUBCASE("checkpoints may not exceed the horizon") {
        config.checkpoints = {1.0, 11.0};
        CHECK_THROWS_AS(model::validate_scenario(config), ValidationError);
    }
    SUBCASE("initial state must have positive sum") {
        config.init = init2(0, 0);
        CHECK_THROWS_AS(model::validate_scenario(config), ValidationError);
    }
    SUBCASE("ensemble size must be positive") {
        config.ensemble_size = 0;
        CHECK_THROWS_AS(model::validate_scenario(config), ValidationError);
    }
    SUBCASE("dimension mismatch") {
        Eigen::VectorXd v(1);
        v << 1.0;
        config.init = {v};
        CHECK_THROWS_AS(model::validate_scenario(config), ValidationError);
    }
}
