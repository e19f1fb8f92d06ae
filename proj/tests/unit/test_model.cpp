#include <doctest.h>

#include <cmath>

#include "svol/model.hpp"
#include "svol/moments.hpp"
#include "svol/rng.hpp"
#include "test_util.hpp"

using namespace svol;
using test::make_params;

TEST_CASE("validate accepts the fitted reference parameters") {
  const auto p = test::table1_params();
  CHECK_NOTHROW(validate(p));
  CHECK(is_valid(p));
}

TEST_CASE("validate rejects the unit-root boundary") {
  auto check_code = [](const ModelParams& p, Errc expected) {
    try {
      validate(p);
      FAIL("expected a validation error");
    } catch (const Error& e) {
      CHECK(e.code() == expected);
    }
  };
  check_code(make_params(0, 1.0, 1, 0, ModelKind::Classical), Errc::StationarityViolation);
  check_code(make_params(0, -1.0, 1, 0, ModelKind::Classical), Errc::StationarityViolation);
  check_code(make_params(0, 1.3, 1, 0, ModelKind::Classical), Errc::StationarityViolation);
}

TEST_CASE("validate rejects bad sigma, rho, and kind constraints") {
  auto code_of = [](const ModelParams& p) {
    try {
      validate(p);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::ConfigError;
  };
  CHECK(code_of(make_params(0, 0.5, 0.0, 0, ModelKind::Classical)) ==
        Errc::NonPositiveSigma);
  CHECK(code_of(make_params(0, 0.5, -1.0, 0, ModelKind::Classical)) ==
        Errc::NonPositiveSigma);
  CHECK(code_of(make_params(0, 0.5, 1.0, 1.0, ModelKind::Correlated)) ==
        Errc::CorrelationOutOfRange);
  CHECK(code_of(make_params(0, 0.5, 1.0, 0.3, ModelKind::Classical)) ==
        Errc::KindConstraintViolation);
}

TEST_CASE("classical return conditional is N(0, e^h)") {
  const auto p = make_params(-3, 0.7, 0.4, 0, ModelKind::Classical);
  const auto c = return_conditional(p, -7.0, 12.0);
  CHECK(c.mean == 0.0);
  CHECK(c.var == doctest::Approx(std::exp(-7.0)).epsilon(1e-14));
}

TEST_CASE("correlated conditional mean vanishes when h_t equals its conditional mean") {
  const auto p = make_params(0, 0, 1, 0.5, ModelKind::Correlated);
  const auto c = return_conditional(p, 0.0, 0.0);
  CHECK(c.mean == 0.0);
  CHECK(c.var == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("mean-corrected conditional at the fixed point is (mu, e^h (1-rho^2))") {
  const auto p = test::table1_params();
  const auto c = return_conditional(p, -7.88, -7.88);
  CHECK(c.mean == doctest::Approx(mean_correction(p)).epsilon(1e-14));
  CHECK(c.var ==
        doctest::Approx(std::exp(-7.88) * (1.0 - 0.105 * 0.105)).epsilon(1e-14));
}

TEST_CASE("volatility conditional examples") {
  {
    const auto c = volatility_conditional(make_params(0, 0.9, 0.3, 0), 1.0);
    CHECK(c.mean == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(c.var == doctest::Approx(0.09).epsilon(1e-15));
  }
  {
    const auto c = volatility_conditional(test::table1_params(), -7.88);
    CHECK(c.mean == doctest::Approx(-7.88).epsilon(1e-15));
    CHECK(c.var == doctest::Approx(0.0324).epsilon(1e-15));
  }
  {
    const auto c = volatility_conditional(make_params(2, 0, 1, 0), 100.0);
    CHECK(c.mean == 2.0);
    CHECK(c.var == 1.0);
  }
}

TEST_CASE("conditional variance identities hold for random parameters") {
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const double alpha = 4.0 * rng.normal();
    const double phi = std::tanh(rng.normal());
    const double sigma = std::exp(0.5 * rng.normal());
    const double rho = std::tanh(rng.normal());
    const double h_t = alpha + 2.0 * rng.normal();
    const double h_prev = alpha + 2.0 * rng.normal();

    const auto p = make_params(alpha, phi, sigma, rho, ModelKind::Correlated);
    const auto rc = return_conditional(p, h_t, h_prev);
    CHECK(rc.var == std::exp(h_t) * (1.0 - rho * rho));
    const auto vc = volatility_conditional(p, h_prev);
    CHECK(vc.var == sigma * sigma);

    // Conditional mean is linear in the standardized innovation.
    const double innovation = h_t - alpha - phi * (h_prev - alpha);
    CHECK(rc.mean ==
          doctest::Approx(rho * std::exp(h_t / 2.0) / sigma * innovation)
              .epsilon(1e-12));
  }
}

TEST_CASE("classical and correlated conditionals coincide at rho = 0") {
  Rng rng(99);
  for (int i = 0; i < 50; ++i) {
    const double alpha = rng.normal();
    const double phi = 0.9 * std::tanh(rng.normal());
    const double sigma = std::exp(0.3 * rng.normal());
    const double h_t = alpha + rng.normal();
    const double h_prev = alpha + rng.normal();
    const auto classical = make_params(alpha, phi, sigma, 0, ModelKind::Classical);
    const auto correlated = make_params(alpha, phi, sigma, 0, ModelKind::Correlated);
    const auto a = return_conditional(classical, h_t, h_prev);
    const auto b = return_conditional(correlated, h_t, h_prev);
    CHECK(a.mean == b.mean);
    CHECK(a.var == b.var);
  }
}

TEST_CASE("stationary variance") {
  CHECK(stationary_variance(make_params(0, 0.96, 0.18, 0, ModelKind::Classical)) ==
        doctest::Approx(0.0324 / (1 - 0.9216)).epsilon(1e-14));
}
