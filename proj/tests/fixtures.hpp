// Shared fixtures and independent oracles for the test suites. The
// oracles deliberately avoid the library's own code paths: Kronecker
// products by quadruple index loops, partial traces by index summation,
// hidden Markov densities by path enumeration, graph properties by
// breadth-first search.
#ifndef SPINCHAIN_TESTS_FIXTURES_HPP
#define SPINCHAIN_TESTS_FIXTURES_HPP

#include <numeric>
#include <queue>
#include <random>

#include "spinchain/fcs.hpp"
#include "spinchain/ldp.hpp"

namespace fixtures {

using spinchain::Complex;
using spinchain::Index;
using spinchain::Matrix;
using spinchain::RealMatrix;
using spinchain::RealVector;

// ---------------------------------------------------------------- random

inline Matrix random_matrix(Index rows, Index cols, std::mt19937& rng) {
  std::normal_distribution<double> gauss;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      m(i, j) = Complex(gauss(rng), gauss(rng));
  return m;
}

inline Matrix random_hermitian(Index d, std::mt19937& rng) {
  Matrix g = random_matrix(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

// Full-rank density: G G^dagger plus a small multiple of the identity.
inline Matrix random_density(Index d, std::mt19937& rng,
                             double floor = 0.05) {
  Matrix g = random_matrix(d, d, rng);
  Matrix rho = g * g.adjoint() + floor * spinchain::identity(d);
  return rho / rho.trace().real();
}

// Possibly rank-deficient density of the given rank.
inline Matrix random_density_rank(Index d, Index rank, std::mt19937& rng) {
  Matrix g = random_matrix(d, rank, rng);
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline RealMatrix random_stochastic(Index n, std::mt19937& rng) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  RealMatrix t(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) t(i, j) = unif(rng);
    t.row(i) /= t.row(i).sum();
  }
  return t;
}

// Strictly positive cycle i -> i+1 kept, so the chain stays irreducible
// even after sparsification.
inline RealMatrix random_sparse_stochastic(Index n, std::mt19937& rng,
                                           double zero_prob = 0.4) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::bernoulli_distribution drop(zero_prob);
  RealMatrix t(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      bool on_cycle = (j == (i + 1) % n);
      t(i, j) = (on_cycle || !drop(rng)) ? unif(rng) : 0.0;
    }
    t.row(i) /= t.row(i).sum();
  }
  return t;
}

// ----------------------------------------------------- classical oracles

// Strong connectivity of the digraph of positive entries (forward and
// reverse reachability from vertex 0).
inline bool digraph_strongly_connected(const RealMatrix& t,
                                       double tol = 1e-12) {
  const Index n = t.rows();
  auto reach = [&](bool transpose) {
    std::vector<bool> seen(static_cast<size_t>(n), false);
    std::queue<Index> q;
    q.push(0);
    seen[0] = true;
    while (!q.empty()) {
      Index u = q.front();
      q.pop();
      for (Index v = 0; v < n; ++v) {
        double w = transpose ? t(v, u) : t(u, v);
        if (w > tol && !seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = true;
          q.push(v);
        }
      }
    }
    return seen;
  };
  auto fwd = reach(false), bwd = reach(true);
  for (Index v = 0; v < n; ++v)
    if (!fwd[static_cast<size_t>(v)] || !bwd[static_cast<size_t>(v)])
      return false;
  return true;
}

// Period of a strongly connected digraph: gcd of level differences
// along edges in a BFS tree.
inline int digraph_period(const RealMatrix& t, double tol = 1e-12) {
  const Index n = t.rows();
  std::vector<int> level(static_cast<size_t>(n), -1);
  std::queue<Index> q;
  q.push(0);
  level[0] = 0;
  while (!q.empty()) {
    Index u = q.front();
    q.pop();
    for (Index v = 0; v < n; ++v)
      if (t(u, v) > tol && level[static_cast<size_t>(v)] < 0) {
        level[static_cast<size_t>(v)] = level[static_cast<size_t>(u)] + 1;
        q.push(v);
      }
  }
  int g = 0;
  for (Index u = 0; u < n; ++u)
    for (Index v = 0; v < n; ++v)
      if (t(u, v) > tol)
        g = std::gcd(g, level[static_cast<size_t>(u)] + 1 -
                            level[static_cast<size_t>(v)]);
  return g == 0 ? 1 : std::abs(g);
}

inline bool digraph_aperiodic(const RealMatrix& t, double tol = 1e-12) {
  return digraph_period(t, tol) == 1;
}

// Stationary distribution by long power iteration (oracle path).
inline RealVector stationary_oracle(const RealMatrix& t, int iters = 20000) {
  RealVector r = RealVector::Constant(t.rows(), 1.0 / t.rows());
  for (int i = 0; i < iters; ++i) {
    r = t.transpose() * r;
    r /= r.sum();
  }
  return r;
}

// ---------------------------------------------------- structural oracles

// Kronecker product by explicit quadruple-index loops.
inline Matrix kron_oracle(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index k = 0; k < b.rows(); ++k)
        for (Index l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Partial trace by index summation: keep one factor of a bipartite
// split d1 (x) d2.
inline Matrix ptrace_first_oracle(const Matrix& x, Index d1, Index d2) {
  // Traces out the *second* factor, keeps the first.
  Matrix out = Matrix::Zero(d1, d1);
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < d1; ++j)
      for (Index k = 0; k < d2; ++k) out(i, j) += x(i * d2 + k, j * d2 + k);
  return out;
}

inline Matrix ptrace_second_oracle(const Matrix& x, Index d1, Index d2) {
  // Traces out the *first* factor, keeps the second.
  Matrix out = Matrix::Zero(d2, d2);
  for (Index k = 0; k < d1; ++k)
    for (Index i = 0; i < d2; ++i)
      for (Index j = 0; j < d2; ++j) out(i, j) += x(k * d2 + i, k * d2 + j);
  return out;
}

// Hidden Markov local density by brute-force path enumeration:
// omega_n = sum over paths x_1..x_{n+1} of
//   r_{x1} T_{x1 x2} ... T_{xn xn+1} theta_{x1 x2} (x) ... (x) theta_{xn xn+1}.
inline Matrix hmm_density_oracle(const spinchain::HiddenMarkovSpec& spec,
                                 const RealVector& r, int n) {
  const Index m = spec.T.rows();
  Index dim = 1;
  for (int i = 0; i < n; ++i) dim *= spec.d_A;
  Matrix out = Matrix::Zero(dim, dim);
  std::vector<Index> path(static_cast<size_t>(n + 1), 0);
  while (true) {
    double mu = r[path[0]];
    for (int i = 0; i < n; ++i) mu *= spec.T(path[i], path[i + 1]);
    if (mu > 0) {
      Matrix term = Matrix::Ones(1, 1);
      for (int i = 0; i < n; ++i)
        term = kron_oracle(term, spec.theta[path[i]][path[i + 1]]);
      out += mu * term;
    }
    int pos = n;
    while (pos >= 0 && path[static_cast<size_t>(pos)] == m - 1) {
      path[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++path[static_cast<size_t>(pos)];
  }
  return out;
}

// ----------------------------------------------------------- HMM fixtures

inline Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline Matrix ket_density(const Eigen::Vector2cd& v) {
  Eigen::Vector2cd u = v.normalized();
  return u * u.adjoint();
}

// Classical two-state chain, deterministic emission of the source
// symbol: the Markov measure itself.
inline spinchain::HiddenMarkovSpec hmm_classical_a() {
  spinchain::HiddenMarkovSpec s;
  s.d_A = 2;
  s.T = RealMatrix(2, 2);
  s.T << 0.7, 0.3, 0.4, 0.6;
  s.theta = {{diag2(1, 0), diag2(1, 0)}, {diag2(0, 1), diag2(0, 1)}};
  return s;
}

// Two-state chain emitting the conjugate basis |+>, |->: orthogonal
// supports across the first index, non-commuting with hmm_classical_a.
inline spinchain::HiddenMarkovSpec hmm_plus_minus() {
  spinchain::HiddenMarkovSpec s;
  s.d_A = 2;
  s.T = RealMatrix(2, 2);
  s.T << 0.7, 0.3, 0.4, 0.6;
  Matrix plus = ket_density({1.0, 1.0});
  Matrix minus = ket_density({1.0, -1.0});
  s.theta = {{plus, plus}, {minus, minus}};
  return s;
}

// Symmetric chain with faithful mixed emissions; stationary r uniform,
// so the certified upper factorization constant is d_B / (1/2) = 4.
inline spinchain::HiddenMarkovSpec hmm_symmetric_mixed() {
  spinchain::HiddenMarkovSpec s;
  s.d_A = 2;
  s.T = RealMatrix(2, 2);
  s.T << 0.5, 0.5, 0.5, 0.5;
  Matrix a(2, 2), b(2, 2);
  a << Complex(0.7, 0.0), Complex(0.2, 0.1), Complex(0.2, -0.1),
      Complex(0.3, 0.0);
  b << Complex(0.4, 0.0), Complex(0.0, -0.2), Complex(0.0, 0.2),
      Complex(0.6, 0.0);
  s.theta = {{a, b}, {b, a}};
  return s;
}

// Three-state chain with mixed emissions depending on both indices.
inline spinchain::HiddenMarkovSpec hmm_three_state() {
  spinchain::HiddenMarkovSpec s;
  s.d_A = 2;
  s.T = RealMatrix(3, 3);
  s.T << 0.6, 0.3, 0.1, 0.2, 0.5, 0.3, 0.3, 0.3, 0.4;
  Matrix a = diag2(0.8, 0.2);
  Matrix b = diag2(0.3, 0.7);
  Matrix c(2, 2);
  c << Complex(0.5, 0.0), Complex(0.1, 0.2), Complex(0.1, -0.2),
      Complex(0.5, 0.0);
  s.theta = {{a, b, c}, {b, c, a}, {c, a, b}};
  return s;
}

// Irreducible classical chain (deterministic emission of the source
// symbol) with a vanishing transition probability.
inline spinchain::HiddenMarkovSpec hmm_zero_entry() {
  spinchain::HiddenMarkovSpec s;
  s.d_A = 2;
  s.T = RealMatrix(2, 2);
  s.T << 0.0, 1.0, 0.5, 0.5;
  s.theta = {{diag2(1, 0), diag2(1, 0)}, {diag2(0, 1), diag2(0, 1)}};
  return s;
}

inline std::vector<spinchain::HiddenMarkovSpec> all_hmm_fixtures() {
  return {hmm_classical_a(), hmm_plus_minus(), hmm_symmetric_mixed(),
          hmm_three_state(), hmm_zero_entry()};
}

// Fixtures whose unit transfer map is primitive with a healthy gap.
inline std::vector<spinchain::HiddenMarkovSpec> primitive_hmm_fixtures() {
  return {hmm_classical_a(), hmm_plus_minus(), hmm_symmetric_mixed(),
          hmm_three_state()};
}

// Bernoulli(p) product state on a qubit, diagonal in the standard basis.
inline spinchain::GeneratingTriple bernoulli_triple(double p) {
  return spinchain::product_triple(diag2(1.0 - p, p));
}

// -------------------------------------------------- interaction fixtures

inline Matrix pauli_z() { return diag2(1.0, -1.0); }

inline Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

// Nearest-neighbour Ising interaction h z + J z z.
inline spinchain::Interaction ising(double h, double j) {
  spinchain::Interaction phi;
  phi.d_A = 2;
  phi.range = 1;
  phi.window_terms = {h * pauli_z(), j * kron_oracle(pauli_z(), pauli_z())};
  return phi;
}

// Transverse-field Ising: non-commuting window terms.
inline spinchain::Interaction transverse_ising(double h, double j) {
  spinchain::Interaction phi;
  phi.d_A = 2;
  phi.range = 1;
  phi.window_terms = {h * pauli_x(), j * kron_oracle(pauli_z(), pauli_z())};
  return phi;
}

inline spinchain::Interaction one_site_field(double h) {
  spinchain::Interaction phi;
  phi.d_A = 2;
  phi.range = 0;
  phi.window_terms = {h * pauli_z()};
  return phi;
}

}  // namespace fixtures

#endif
