#include "lioueps/errors.hpp"
#include "lioueps/models.hpp"
#include "lioueps/spectral.hpp"

#include <doctest.h>

using namespace lioueps;

namespace {

std::vector<cplx> spectrum(const LindbladModel& m) {
  return analyze_liouvillian(assemble_liouvillian(m)).eigenvalues;
}

}  // namespace

TEST_CASE("example 1 closed form, including the eigenmatrices") {
  for (double gx : {0.3, 2.0, 3.7}) {
    const auto m = example1(1, 1, gx, 2);
    const auto cf = example1_closed_form(1, 1, gx, 2);
    CHECK(multiset_distance(spectrum(m), {cf.lambda.begin(), cf.lambda.end()}) <= 1e-10);
    for (int k = 0; k < 4; ++k) {
      if (!cf.rho[k]) continue;
      const Operator r = *cf.rho[k];
      CHECK(hs_norm(apply_liouvillian(m, r) - cf.lambda[k] * r) <= 1e-10);
    }
  }
}

TEST_CASE("example 2 closed form") {
  for (double g : {0.5, 3.0, 6.0}) {
    const auto m = example2(1, g);
    const auto cf = example2_closed_form(1, g);
    CHECK(multiset_distance(spectrum(m), {cf.lambda.begin(), cf.lambda.end()}) <= 1e-10);
    for (int k = 0; k < 4; ++k) CHECK(hs_norm(apply_liouvillian(m, cf.rho[k]) - cf.lambda[k] * cf.rho[k]) <= 1e-10);
    const auto q = build_qubit_ops();
    CHECK(hs_inner(q.sz, cf.rho[0]).real() == doctest::Approx(cf.sigma_z_ss).epsilon(1e-12));
  }
}

TEST_CASE("example 3 one-excitation closed form") {
  const auto cf = example3_one_excitation_closed_form(1, 0.3, 1, 0.5, 3);
  const Operator heff = effective_hamiltonian(example3(1, 0.3, 1, 0.5, 3));
  for (int k = 0; k < 2; ++k) CHECK((heff * cf.phi[k] - cf.h[k] * cf.phi[k]).norm() <= 1e-12);
  CHECK(cf.g_ep == doctest::Approx(0.125));
}

TEST_CASE("example 3 conserves the excitation number") {
  const Operator heff = effective_hamiltonian(example3(1, 0.2, 1, 0.5, 4));
  CHECK(excitation_leakage(heff, 4) == 0.0);
  const auto blocks = excitation_blocks(heff, 4);
  CHECK(blocks.size() == 4);
  CHECK(blocks[2].indices.size() == 3);
}

TEST_CASE("example 3 mean-field matrix") {
  const auto m = example3(1, 0.2, 1, 0.5, 3);
  const Matrix k = example3_mean_field_matrix(m, 3);
  CHECK((k - example3_mean_field_closed_form(1, 0.2, 1, 0.5)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("dephasing closed form") {
  const auto m = dephasing(0.7, 0.4, 3);
  CHECK(multiset_distance(spectrum(m), dephasing_closed_form(0.7, 0.4, 3)) <= 1e-12);
}

TEST_CASE("sigma_z curves coincide in the unitary limit and for the steady state") {
  const auto c = sigma_z_expectations(1, {0.0, 1.0, 5.0});
  CHECK(c.steady.size() == 3);
  CHECK(c.steady[0] == doctest::Approx(0.0));
  CHECK(c.steady[1] == doctest::Approx(1.0 / 3.0));
  const std::vector<double> v{1.0, 1.0 + 1e-12, 2.0};
  CHECK(distinct_count(v, 1e-9) == 2);
}

TEST_CASE("builders validate their parameters") {
  CHECK_THROWS_AS(example1(1, -1, 1, 1), DomainError);
  CHECK_THROWS_AS(example2(0, 1), DomainError);
  CHECK_THROWS_AS(example3(1, 0.1, 1, 0.5, 1), DomainError);
  CHECK_THROWS_AS(dephasing(1, -0.1, 3), DomainError);
}

TEST_CASE("registry") {
  CHECK(model_families().size() == 4);
  CHECK_THROWS_WITH(model_family("nope"), doctest::Contains("example1"));
  const auto p = complete_params(model_family("example2"), {{"gamma_minus", 3}});
  CHECK(p.at("omega_x") == 1.0);
  CHECK(p.at("gamma_minus") == 3.0);
  CHECK_THROWS_AS(complete_params(model_family("example2"), {{"bogus", 1}}), DomainError);
  const auto errs = param_errors(model_family("example2"), {{"omega_x", 1}, {"gamma_minus", -1}});
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].find("gamma_minus") != std::string::npos);
  CHECK_THROWS(make_family("example3", complete_params(model_family("example3"), {}), "levels"));
  const Family f = make_family("example2", complete_params(model_family("example2"), {}), "gamma_minus");
  CHECK(std::abs(effective_hamiltonian(f(2.0))(1, 1) - cplx(0, -1)) <= 1e-15);
  CHECK(closed_form_liouvillian("example2", p).has_value());
  CHECK_FALSE(closed_form_liouvillian("example3", complete_params(model_family("example3"), {})).has_value());
}
