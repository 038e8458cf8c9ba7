#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "spinchain/fcs.hpp"

using namespace spinchain;

namespace {
double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("hidden Markov fixtures produce valid generating triples") {
  for (const HiddenMarkovSpec& spec : fixtures::all_hmm_fixtures()) {
    GeneratingTriple t = from_hidden_markov(spec);
    TripleValidation v = validate_triple(t);
    INFO("failures: ", v.failures.empty() ? "none" : v.failures[0]);
    CHECK(v.valid);
    CHECK(v.unitality_residual < 1e-10);
    CHECK(v.invariance_residual < 1e-10);
  }
}

TEST_CASE("product triples validate") {
  TripleValidation v = validate_triple(fixtures::bernoulli_triple(0.3));
  CHECK(v.valid);
}

TEST_CASE("validate_triple flags a broken invariant state") {
  GeneratingTriple t = from_hidden_markov(fixtures::hmm_classical_a());
  t.rho = identity(t.d_B) / static_cast<double>(t.d_B);  // not invariant
  TripleValidation v = validate_triple(t);
  CHECK_FALSE(v.valid);
  CHECK(v.invariance_residual > 1e-3);
}

TEST_CASE("local_density matches the path-enumeration oracle") {
  for (const HiddenMarkovSpec& spec : fixtures::all_hmm_fixtures()) {
    GeneratingTriple t = from_hidden_markov(spec);
    RealVector r = fixtures::stationary_oracle(spec.T);
    for (int n = 1; n <= 3; ++n) {
      Matrix expect = fixtures::hmm_density_oracle(spec, r, n);
      Matrix got = local_density(t, n);
      CHECK(max_abs(got - expect) < 1e-9);
    }
  }
}

TEST_CASE("local densities are consistent under restriction") {
  GeneratingTriple t = from_hidden_markov(fixtures::hmm_three_state());
  Matrix w4 = local_density(t, 4);
  Matrix w3 = local_density(t, 3);
  // Translation invariance: dropping the last or the first site both
  // recover the 3-site density.
  CHECK(max_abs(partial_trace(w4, {8, 2}, {0}) - w3) < 1e-10);
  CHECK(max_abs(partial_trace(w4, {2, 8}, {1}) - w3) < 1e-10);
  CHECK(w3.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("product triple densities are tensor powers") {
  Matrix phi1 = fixtures::diag2(0.7, 0.3);
  GeneratingTriple t = product_triple(phi1);
  CHECK(max_abs(local_density(t, 3) - tensor_power(phi1, 3)) < 1e-12);
}

TEST_CASE("local_density enforces the cap") {
  GeneratingTriple t = fixtures::bernoulli_triple(0.5);
  CHECK_THROWS_AS(local_density(t, 5, 16), CapExceededError);
  CHECK_NOTHROW(local_density(t, 4, 16));
}

TEST_CASE("block transfer maps compose out of single-site maps") {
  std::mt19937 rng(31);
  GeneratingTriple t = from_hidden_markov(fixtures::hmm_symmetric_mixed());
  Matrix a1 = fixtures::random_hermitian(2, rng);
  Matrix a2 = fixtures::random_hermitian(2, rng);
  Matrix b = fixtures::random_hermitian(t.d_B, rng);

  Matrix via_block =
      block_transfer_map(t, tensor_product(a1, a2)).apply(b);
  Matrix inner = t.E.apply(tensor_product(a2, b));
  Matrix outer = t.E.apply(tensor_product(a1, inner));
  CHECK(max_abs(via_block - outer) < 1e-11);

  // E^(1) on 1_A is the unit transfer map.
  CHECK(max_abs(block_transfer_map(t, identity(2)).mat -
                unit_transfer_map(t).mat) < 1e-12);
}

TEST_CASE("transfer expectation identity rho(E^(n)(X (x) 1)) = Tr w_n X") {
  std::mt19937 rng(32);
  GeneratingTriple t = from_hidden_markov(fixtures::hmm_three_state());
  for (int n = 1; n <= 3; ++n) {
    Index dim = 1;
    for (int i = 0; i < n; ++i) dim *= t.d_A;
    Matrix x = fixtures::random_hermitian(dim, rng);
    Matrix transferred = block_transfer_map(t, x).apply(identity(t.d_B));
    double lhs = (t.rho * transferred).trace().real();
    double rhs = (local_density(t, n) * x).trace().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("unit transfer map of a hidden Markov triple acts as T") {
  const HiddenMarkovSpec spec = fixtures::hmm_classical_a();
  GeneratingTriple t = from_hidden_markov(spec);
  Superoperator e1 = unit_transfer_map(t);
  // On diagonal b: E_1(b) = diag(T diag(b)).
  Matrix b = Matrix::Zero(2, 2);
  b(0, 0) = 0.3;
  b(1, 1) = 1.1;
  RealVector expect = spec.T * RealVector(Eigen::Vector2d(0.3, 1.1));
  Matrix got = e1.apply(b);
  CHECK(got(0, 0).real() == doctest::Approx(expect[0]));
  CHECK(got(1, 1).real() == doctest::Approx(expect[1]));
  CHECK(e1.apply(identity(2)).isApprox(identity(2), 1e-10));
}

TEST_CASE("stationary_distribution matches power iteration") {
  std::mt19937 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    RealMatrix t = fixtures::random_stochastic(2 + trial % 4, rng);
    RealVector got = stationary_distribution(t);
    RealVector expect = fixtures::stationary_oracle(t);
    CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(got.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("diagonal_embedding_map spectrum contains the spectrum of T") {
  RealMatrix t(2, 2);
  t << 0.9, 0.1, 0.2, 0.8;
  SpectrumReport spec = superoperator_spectrum(
      Superoperator::from_kraus(diagonal_embedding_map(t)));
  // Eigenvalues of T: 1 and 0.7.
  bool found_one = false, found_07 = false;
  for (Index i = 0; i < spec.eigenvalues.size(); ++i) {
    if (std::abs(spec.eigenvalues[i] - Complex(1.0, 0.0)) < 1e-9)
      found_one = true;
    if (std::abs(spec.eigenvalues[i] - Complex(0.7, 0.0)) < 1e-9)
      found_07 = true;
  }
  CHECK(found_one);
  CHECK(found_07);
}

TEST_CASE("ergodicity classification across fixtures") {
  // Primitive fixtures: ergodic and strongly mixing.
  for (const HiddenMarkovSpec& spec : fixtures::primitive_hmm_fixtures()) {
    ErgodicityReport r = classify_ergodicity(from_hidden_markov(spec));
    CHECK(r.ergodic);
    CHECK(r.strongly_mixing);
    CHECK(std::abs(r.perron.spectral_radius - 1.0) < 1e-10);
  }
  // The zero-entry fixture is still irreducible and aperiodic
  // (self-loop at state 1).
  ErgodicityReport rz =
      classify_ergodicity(from_hidden_markov(fixtures::hmm_zero_entry()));
  CHECK(rz.ergodic);

  // A periodic classical chain: ergodic but not strongly mixing.
  HiddenMarkovSpec per = fixtures::hmm_classical_a();
  per.T << 0.0, 1.0, 1.0, 0.0;
  ErgodicityReport rp = classify_ergodicity(from_hidden_markov(per));
  CHECK(rp.ergodic);
  CHECK_FALSE(rp.strongly_mixing);
}

TEST_CASE("a product of two independent blocks is not ergodic") {
  // Block-diagonal T: two disconnected states.
  HiddenMarkovSpec spec = fixtures::hmm_classical_a();
  spec.T << 1.0, 0.0, 0.0, 1.0;
  spec.r = RealVector(2);
  spec.r << 0.5, 0.5;
  ErgodicityReport r = classify_ergodicity(from_hidden_markov(spec));
  CHECK_FALSE(r.ergodic);
}

TEST_CASE("stationary_state recovers the invariant density") {
  for (const HiddenMarkovSpec& spec : fixtures::primitive_hmm_fixtures()) {
    GeneratingTriple t = from_hidden_markov(spec);
    StationaryStateResult fixed = stationary_state(unit_transfer_map(t));
    CHECK(max_abs(fixed.density - t.rho) < 1e-8);
    CHECK(fixed.residual < 1e-9);
    CHECK(fixed.multiplicity == 1);
  }
}

TEST_CASE("stationary_state handles the periodic chain via Cesaro") {
  RealMatrix per(2, 2);
  per << 0.0, 1.0, 1.0, 0.0;
  StationaryStateResult fixed = stationary_state(
      Superoperator::from_kraus(diagonal_embedding_map(per)));
  CHECK(max_abs(fixed.density - identity(2) * 0.5) < 1e-6);
  CHECK(fixed.residual < 1e-6);
}

TEST_CASE("validate_hidden_markov rejects malformed specs") {
  HiddenMarkovSpec bad = fixtures::hmm_classical_a();
  bad.T(0, 0) = 0.5;  // row sums 0.6
  CHECK_THROWS(validate_hidden_markov(bad));

  HiddenMarkovSpec bad2 = fixtures::hmm_classical_a();
  bad2.theta[0][0] = fixtures::diag2(1.2, -0.2);  // not PSD
  CHECK_THROWS(validate_hidden_markov(bad2));

  HiddenMarkovSpec bad3 = fixtures::hmm_classical_a();
  bad3.r = RealVector(2);
  bad3.r << 0.5, 0.5;  // not stationary for this T
  CHECK_THROWS(validate_hidden_markov(bad3));
}
