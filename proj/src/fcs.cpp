#include "spinchain/fcs.hpp"

#include <cmath>
#include <limits>

namespace spinchain {

namespace {

// Applies id_D (x) k to y, where y acts on C^D (x) C^{k.in_dim}.
Matrix apply_padded(Index D, const KrausMap& k, const Matrix& y) {
  const Index s_in = k.in_dim, s_out = k.out_dim;
  if (y.rows() != D * s_in)
    throw DimensionError("apply_padded: dimension mismatch");
  Matrix out = Matrix::Zero(D * s_out, D * s_out);
  for (Index p = 0; p < D; ++p)
    for (Index q = 0; q < D; ++q) {
      const Matrix block = y.block(p * s_in, q * s_in, s_in, s_in);
      Matrix acc = Matrix::Zero(s_out, s_out);
      for (const Matrix& op : k.kraus) acc += op * block * op.adjoint();
      out.block(p * s_out, q * s_out, s_out, s_out) = acc;
    }
  return out;
}

Index power_of(Index d, Index value, const char* what) {
  Index dim = 1;
  while (dim < value) dim *= d;
  if (dim != value)
    throw DimensionError(std::string(what) +
                         ": dimension is not a power of the site dimension");
  return dim;
}

}  // namespace

TripleValidation validate_triple(const GeneratingTriple& t, double tol,
                                 double faithful_tol) {
  if (t.E.in_dim != t.d_A * t.d_B || t.E.out_dim != t.d_B)
    throw DimensionError("validate_triple: E has wrong shape");
  if (t.rho.rows() != t.d_B || t.rho.cols() != t.d_B)
    throw DimensionError("validate_triple: rho has wrong shape");

  TripleValidation v;
  v.unitality_residual = t.E.unitality_residual();
  v.choi_min_eigenvalue = choi_and_cp_check(t.E).min_eigenvalue;
  v.rho_hermiticity_error = hermiticity_error(t.rho);
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        Matrix(0.5 * (t.rho + t.rho.adjoint())), Eigen::EigenvaluesOnly);
    v.rho_min_eigenvalue = es.eigenvalues().minCoeff();
  }
  v.rho_trace_error = std::abs(t.rho.trace() - Complex(1.0, 0.0));

  Matrix phi1 = triple_adjoint_step(t, t.rho);
  Matrix traced = partial_trace(phi1, {t.d_A, t.d_B}, {1});
  v.invariance_residual = (traced - t.rho).cwiseAbs().maxCoeff();

  if (v.unitality_residual > tol) v.failures.push_back("unitality");
  if (v.choi_min_eigenvalue < -tol) v.failures.push_back("complete_positivity");
  if (v.rho_hermiticity_error > tol) v.failures.push_back("rho_hermitian");
  if (v.rho_min_eigenvalue <= faithful_tol) v.failures.push_back("rho_faithful");
  if (v.rho_trace_error > tol) v.failures.push_back("rho_trace");
  if (v.invariance_residual > tol) v.failures.push_back("invariance");
  v.valid = v.failures.empty();
  return v;
}

Matrix triple_adjoint_step(const GeneratingTriple& t, const Matrix& rho) {
  return t.E.adjoint().apply(rho);
}

Superoperator block_transfer_map(const GeneratingTriple& t, const Matrix& x) {
  require_square(x, "block_transfer_map");
  power_of(t.d_A, x.rows(), "block_transfer_map");
  const Index d_A = t.d_A, d_B = t.d_B;
  const KrausMap& e = t.E;
  return Superoperator::from_function(d_B, d_B, [&](const Matrix& b) {
    Matrix y = tensor_product(x, b);
    while (y.rows() > d_B) {
      Index D = y.rows() / (d_A * d_B);
      y = apply_padded(D, e, y);
    }
    return y;
  });
}

Superoperator unit_transfer_map(const GeneratingTriple& t) {
  // Kraus form: split each operator into its d_A column blocks.
  std::vector<Matrix> ops;
  for (const Matrix& k : t.E.kraus)
    for (Index j = 0; j < t.d_A; ++j)
      ops.push_back(k.middleCols(j * t.d_B, t.d_B));
  return Superoperator::from_kraus(KrausMap(t.d_B, t.d_B, std::move(ops)));
}

Matrix local_density(const GeneratingTriple& t, int n, Index cap) {
  if (n < 1) throw std::invalid_argument("local_density: n must be >= 1");
  Index dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= t.d_A;
    if (dim > cap)
      throw CapExceededError("local_density: d_A^n exceeds the cap");
  }
  KrausMap e_star = t.E.adjoint();
  Matrix phi = t.rho;
  Index D = 1;
  for (int step = 0; step < n; ++step) {
    phi = apply_padded(D, e_star, phi);
    D *= t.d_A;
  }
  return partial_trace(phi, {dim, t.d_B}, {0});
}

void validate_hidden_markov(const HiddenMarkovSpec& spec, double tol) {
  const Index m = spec.T.rows();
  if (spec.T.cols() != m || m < 1)
    throw DimensionError("hidden markov: T must be square and nonempty");
  for (Index x = 0; x < m; ++x) {
    if (spec.T.row(x).minCoeff() < -tol)
      throw std::invalid_argument("hidden markov: negative entry in T");
    if (std::abs(spec.T.row(x).sum() - 1.0) > tol)
      throw std::invalid_argument("hidden markov: row of T does not sum to 1");
  }
  if (spec.r.size() != 0) {
    if (spec.r.size() != m)
      throw DimensionError("hidden markov: r has wrong length");
    if (spec.r.minCoeff() <= 0)
      throw std::invalid_argument("hidden markov: r must be strictly positive");
    if (std::abs(spec.r.sum() - 1.0) > tol)
      throw std::invalid_argument("hidden markov: r does not sum to 1");
    RealVector rT = spec.T.transpose() * spec.r;
    if ((rT - spec.r).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("hidden markov: r is not stationary for T");
  }
  if (static_cast<Index>(spec.theta.size()) != m)
    throw DimensionError("hidden markov: theta has wrong shape");
  for (Index x = 0; x < m; ++x) {
    if (static_cast<Index>(spec.theta[x].size()) != m)
      throw DimensionError("hidden markov: theta has wrong shape");
    for (Index y = 0; y < m; ++y) {
      if (spec.T(x, y) <= 0) continue;
      const Matrix& th = spec.theta[x][y];
      if (th.rows() != spec.d_A || th.cols() != spec.d_A)
        throw DimensionError("hidden markov: theta entry has wrong dimension");
      require_density(th, tol, tol);
    }
  }
}

GeneratingTriple from_hidden_markov(const HiddenMarkovSpec& spec) {
  validate_hidden_markov(spec);
  HiddenMarkovSpec s = spec;
  if (s.r.size() == 0) {
    s.r = stationary_distribution(s.T);
    validate_hidden_markov(s);
  }
  const Index m = s.T.rows(), d_A = s.d_A;

  // E* has Kraus operators sqrt(T_xy lambda) (v (x) |y>)<x| built from
  // the eigendecompositions of the emission densities; E is its adjoint.
  std::vector<Matrix> kraus;
  for (Index x = 0; x < m; ++x)
    for (Index y = 0; y < m; ++y) {
      if (s.T(x, y) <= 0) continue;
      Eigen::SelfAdjointEigenSolver<Matrix> es(s.theta[x][y]);
      for (Index k = 0; k < d_A; ++k) {
        double lam = es.eigenvalues()[k];
        if (lam <= 1e-14) continue;
        Vector emission = Vector::Zero(d_A * m);
        for (Index a = 0; a < d_A; ++a)
          emission[a * m + y] = es.eigenvectors()(a, k);
        Matrix l = Matrix::Zero(d_A * m, m);
        l.col(x) = std::sqrt(s.T(x, y) * lam) * emission;
        kraus.push_back(l.adjoint());
      }
    }

  GeneratingTriple t;
  t.d_A = d_A;
  t.d_B = m;
  t.E = KrausMap(d_A * m, m, std::move(kraus));
  t.rho = Matrix::Zero(m, m);
  for (Index x = 0; x < m; ++x) t.rho(x, x) = s.r[x];
  return t;
}

RealVector stationary_distribution(const RealMatrix& T) {
  const Index m = T.rows();
  RealMatrix a = T.transpose() - RealMatrix::Identity(m, m);
  Eigen::JacobiSVD<RealMatrix> svd(a, Eigen::ComputeFullV);
  RealVector v = svd.matrixV().col(m - 1);
  if (v.sum() < 0) v = -v;
  double sum = v.sum();
  if (std::abs(sum) < 1e-12)
    throw std::runtime_error("stationary_distribution: degenerate kernel");
  return v / sum;
}

KrausMap diagonal_embedding_map(const RealMatrix& T) {
  const Index m = T.rows();
  std::vector<Matrix> ops;
  for (Index x = 0; x < m; ++x)
    for (Index y = 0; y < m; ++y) {
      if (T(x, y) <= 0) continue;
      Matrix k = Matrix::Zero(m, m);
      k(x, y) = std::sqrt(T(x, y));
      ops.push_back(k);
    }
  return KrausMap(m, m, std::move(ops));
}

GeneratingTriple product_triple(const Matrix& phi1) {
  require_density(phi1);
  // d_B = 1: E(a (x) 1) = phi1(a). Kraus row vectors sqrt(p) <v|.
  Eigen::SelfAdjointEigenSolver<Matrix> es(phi1);
  std::vector<Matrix> ops;
  for (Index k = 0; k < phi1.rows(); ++k) {
    double p = es.eigenvalues()[k];
    if (p <= 1e-14) continue;
    Matrix row = std::sqrt(p) * es.eigenvectors().col(k).adjoint();
    ops.push_back(row);
  }
  GeneratingTriple t;
  t.d_A = phi1.rows();
  t.d_B = 1;
  t.E = KrausMap(phi1.rows(), 1, std::move(ops));
  t.rho = Matrix::Ones(1, 1);
  return t;
}

ErgodicityReport classify_ergodicity(const GeneratingTriple& t) {
  PositivityStructure s =
      classify_positivity_structure(unit_transfer_map(t));
  ErgodicityReport r;
  r.ergodic = s.irreducible;
  r.strongly_mixing = s.primitive;
  r.perron = s.perron;
  return r;
}

StationaryStateResult stationary_state(const Superoperator& e1, double tol) {
  if (e1.in_dim != e1.out_dim)
    throw DimensionError("stationary_state: map is not square");
  const Index d = e1.in_dim;
  Superoperator adj = e1.adjoint();

  Eigen::ComplexEigenSolver<Matrix> es(adj.mat, true);
  double r = es.eigenvalues().cwiseAbs().maxCoeff();
  Index best = 0;
  int multiplicity = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    double dist = std::abs(es.eigenvalues()[i] - Complex(r, 0.0));
    if (dist <= 1e-7 * std::max(r, 1.0)) ++multiplicity;
    if (dist < best_dist) {
      best_dist = dist;
      best = i;
    }
  }

  auto finish = [&](Matrix cand) -> StationaryStateResult {
    cand = 0.5 * (cand + cand.adjoint());
    double tr = cand.trace().real();
    if (std::abs(tr) < 1e-14)
      throw std::runtime_error("stationary_state: traceless candidate");
    cand /= tr;
    Eigen::SelfAdjointEigenSolver<Matrix> esc(cand, Eigen::EigenvaluesOnly);
    if (esc.eigenvalues().minCoeff() < -tol)
      throw std::runtime_error(
          "stationary_state: no PSD fixed point found within tolerance");
    StationaryStateResult out;
    out.density = cand;
    out.multiplicity = std::max(multiplicity, 1);
    out.residual = (adj.apply(cand) - cand).cwiseAbs().maxCoeff();
    return out;
  };

  Matrix cand = unvec(es.eigenvectors().col(best), d, d);
  Complex tr = cand.trace();
  if (std::abs(tr) > 1e-12) cand *= std::abs(tr) / tr;
  Matrix herm = 0.5 * (cand + cand.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> esh(herm, Eigen::EigenvaluesOnly);
  bool psd_ok = esh.eigenvalues().minCoeff() >= -tol &&
                herm.trace().real() > 1e-12;
  if (psd_ok && best_dist <= 1e-7 * std::max(r, 1.0)) return finish(herm);

  // Cesaro fallback: average of the adjoint orbit of the maximally
  // mixed state is a fixed point for unital positive maps.
  Matrix avg = Matrix::Zero(d, d);
  Matrix cur = identity(d) / static_cast<double>(d);
  const int n_iter = 4000;
  for (int i = 0; i < n_iter; ++i) {
    avg += cur;
    cur = adj.apply(cur);
    double s = cur.trace().real();
    if (s > 1e-300) cur /= s;
  }
  return finish(avg / static_cast<double>(n_iter));
}

}  // namespace spinchain
