#ifndef SPINCHAIN_FCS_HPP
#define SPINCHAIN_FCS_HPP

#include <string>
#include <vector>

#include "spinchain/maps.hpp"

namespace spinchain {

// Generating triple (B, E, rho) of a finitely correlated state: E is a
// unital CP map from A (x) B to B, rho a faithful invariant density on B.
struct GeneratingTriple {
  Index d_A = 0;
  Index d_B = 0;
  KrausMap E;   // in_dim = d_A * d_B, out_dim = d_B
  Matrix rho;   // d_B x d_B density, faithful
};

struct TripleValidation {
  double unitality_residual = 0.0;
  double choi_min_eigenvalue = 0.0;
  double rho_min_eigenvalue = 0.0;
  double rho_trace_error = 0.0;
  double rho_hermiticity_error = 0.0;
  double invariance_residual = 0.0;  // || Tr_A E*(rho) - rho ||_max
  bool valid = false;
  std::vector<std::string> failures;
};

TripleValidation validate_triple(const GeneratingTriple& t,
                                 double tol = 1e-8,
                                 double faithful_tol = 1e-10);

// Adjoint action E*(rho) as a density on A (x) B.
Matrix triple_adjoint_step(const GeneratingTriple& t, const Matrix& rho);

// Block transfer map b -> E^(m)(X (x) b) for X on d_A^m sites.
Superoperator block_transfer_map(const GeneratingTriple& t, const Matrix& x);
// E_1 = E(1_A (x) .).
Superoperator unit_transfer_map(const GeneratingTriple& t);

// Exact local density of the finitely correlated state on n sites.
Matrix local_density(const GeneratingTriple& t, int n, Index cap = kDefaultCap);

// Hidden Markov chain data: row-stochastic T, stationary distribution r
// and one-site emission densities theta[x][y] (used when T(x,y) > 0).
struct HiddenMarkovSpec {
  Index d_A = 0;
  RealMatrix T;
  RealVector r;  // may be empty; then the stationary distribution is used
  std::vector<std::vector<Matrix>> theta;
};

void validate_hidden_markov(const HiddenMarkovSpec& spec, double tol = 1e-8);

// Embeds the commutative auxiliary algebra as diagonal matrices and
// builds the generating triple with E*(delta_x) = sum_y T_xy theta_xy
// (x) delta_y.
GeneratingTriple from_hidden_markov(const HiddenMarkovSpec& spec);

// Stationary row vector of a row-stochastic matrix.
RealVector stationary_distribution(const RealMatrix& T);

// Diagonal-algebra map b -> diag(T diag(b)) as a Kraus map on |X|x|X|
// matrices; its nonzero spectrum equals the spectrum of T.
KrausMap diagonal_embedding_map(const RealMatrix& T);

// Product state triple with trivial auxiliary algebra (d_B = 1).
GeneratingTriple product_triple(const Matrix& phi1);

struct ErgodicityReport {
  bool ergodic = false;
  bool strongly_mixing = false;
  PerronData perron;
};

ErgodicityReport classify_ergodicity(const GeneratingTriple& t);

struct StationaryStateResult {
  Matrix density;
  int multiplicity = 1;  // fixed-space dimension; > 1 carries a warning
  double residual = 0.0;
};

// Fixed density of the adjoint of a unital positive map.
StationaryStateResult stationary_state(const Superoperator& e1,
                                       double tol = 1e-8);

}  // namespace spinchain

#endif
