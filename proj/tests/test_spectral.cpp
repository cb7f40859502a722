#include "lioueps/errors.hpp"
#include "lioueps/models.hpp"
#include "lioueps/spectral.hpp"

#include <doctest.h>

using namespace lioueps;

TEST_CASE("biorthonormal eigendecomposition of example 1") {
  const auto spec = analyze_liouvillian(assemble_liouvillian(example1(1, 1, 0.5, 2)));
  REQUIRE(spec.size() == 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(hs_inner(spec.left[i].adjoint(), spec.right[j]) - cplx(i == j ? 1 : 0)) <= 1e-10);
  REQUIRE(spec.steady_state);
  CHECK(std::abs(spec.steady_state->trace() - cplx(1)) <= 1e-12);
  CHECK(spec.steady_state->is_hermitian(1e-10));
  CHECK(spec.zero_indices == std::vector<int>{0});
}

TEST_CASE("sorting is by |Re| then Im") {
  const auto spec = analyze_liouvillian(assemble_liouvillian(example2(1, 1)));
  for (int i = 1; i < spec.size(); ++i)
    CHECK(std::abs(spec.eigenvalues[i].real()) >= std::abs(spec.eigenvalues[i - 1].real()) - 1e-9);
}

TEST_CASE("NHH spectrum and induced Liouvillian pairs") {
  const auto nhh = analyze_nhh(effective_hamiltonian(example2(1, 1)));
  REQUIRE(nhh.h.size() == 2);
  CHECK(nhh.induced.size() == 4);
  const auto cf = example2_closed_form(1, 1);
  std::vector<cplx> num(nhh.h.begin(), nhh.h.end()), ref(cf.h.begin(), cf.h.end());
  CHECK(multiset_distance(num, ref) <= 1e-12);
  CHECK_FALSE(nhh.near_defective);
}

TEST_CASE("NHH near an EP is flagged") {
  const auto nhh = analyze_nhh(effective_hamiltonian(example2(1, 2)));
  CHECK(nhh.near_defective);
}

TEST_CASE("pm decomposition of a Hermitian traceless operator") {
  const auto q = build_qubit_ops();
  const auto d = pm_decomposition(q.sz);
  CHECK(std::abs(d.plus.trace() - cplx(1)) <= 1e-14);
  CHECK(std::abs(d.minus.trace() - cplx(1)) <= 1e-14);
  CHECK(hs_norm(d.weight_plus * d.plus - d.weight_minus * d.minus - q.sz) <= 1e-14);
  CHECK_THROWS(pm_decomposition(q.sm));
}

TEST_CASE("sym/antisym parts are Hermitian") {
  const auto q = build_qubit_ops();
  const auto [s, a] = sym_antisym(q.sm);
  CHECK(s.is_hermitian());
  CHECK(a.is_hermitian());
}

TEST_CASE("lemma checks pass on every family") {
  for (const auto& fam : model_families()) {
    ParamMap p = complete_params(fam, {});
    if (p.count("levels")) p["levels"] = 3;
    const auto m = build_model(fam.name, p);
    const auto rep = check_lemmas(analyze_liouvillian(assemble_liouvillian(m)), m);
    CAPTURE(fam.name);
    CHECK(rep.all_passed());
    CHECK(rep.get("L2").passed);
  }
}

TEST_CASE("commuting-jump formula uses g_l g_m* for a complex jump eigenvalue") {
  // Γ = diag(1, i) commutes with a diagonal H; only the g_l g_m* ordering is right.
  const HilbertSpace s({2});
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 1;
  g(1, 1) = kI;
  Matrix h = Matrix::Zero(2, 2);
  h(0, 0) = 0.3;
  h(1, 1) = -0.7;
  const LindbladModel m(Operator(s, h), {{1.0, Operator(s, g)}});
  const auto spec = analyze_liouvillian(assemble_liouvillian(m));
  const auto pred = commuting_jump_prediction(m);
  REQUIRE(pred.applicable);
  CHECK(multiset_distance(spec.eigenvalues, pred.lambda_gl_gm_conj) <= 1e-12);
  CHECK(multiset_distance(spec.eigenvalues, pred.lambda_gm_gl_conj) > 1e-3);
}

TEST_CASE("commuting-jump formula is not applicable to example 2") {
  CHECK_FALSE(commuting_jump_prediction(example2(1, 1)).applicable);
}

TEST_CASE("L' is diagonalizable without a steady state") {
  const auto spec = diagonalize_superop(assemble_liouvillian_no_jumps(example2(1, 1)));
  CHECK(spec.size() == 4);
  CHECK_FALSE(spec.steady_state);
  CHECK_THROWS_AS(analyze_liouvillian(assemble_liouvillian_no_jumps(example2(1, 1))), NumericalError);
}

TEST_CASE("multiset distance") {
  CHECK(multiset_distance({1, 2}, {2, 1}) == 0.0);
  CHECK(multiset_distance({cplx(0, 1)}, {cplx(0, -1)}) == doctest::Approx(2.0));
}
