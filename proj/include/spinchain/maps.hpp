#ifndef SPINCHAIN_MAPS_HPP
#define SPINCHAIN_MAPS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "spinchain/dense.hpp"

namespace spinchain {

// Column-major vectorization and its inverse.
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Index rows, Index cols);

// Completely positive map X -> sum_i A_i X A_i^* given by rectangular
// Kraus operators of shape out_dim x in_dim.
struct KrausMap {
  Index in_dim = 0;
  Index out_dim = 0;
  std::vector<Matrix> kraus;

  KrausMap() = default;
  KrausMap(Index in, Index out, std::vector<Matrix> ops);

  Matrix apply(const Matrix& x) const;
  // Hilbert-Schmidt adjoint: Y -> sum_i A_i^* Y A_i.
  KrausMap adjoint() const;
  Matrix superoperator() const;
  bool is_unital(double tol = 1e-10) const;
  double unitality_residual() const;
};

// General linear map between matrix spaces, stored as its out^2 x in^2
// matrix on column-major vectorizations. This is the common currency
// for spectra and Perron-Frobenius analysis; transfer maps E_a for
// non-positive a live here as well.
struct Superoperator {
  Index in_dim = 0;
  Index out_dim = 0;
  Matrix mat;

  static Superoperator from_kraus(const KrausMap& k);
  static Superoperator from_function(
      Index in_dim, Index out_dim,
      const std::function<Matrix(const Matrix&)>& f);

  Matrix apply(const Matrix& x) const;
  Superoperator adjoint() const;
  Superoperator compose(const Superoperator& inner) const;
  Superoperator scaled(double c) const;
};

// Choi matrix sum_{ij} E_ij (x) Phi(E_ij), input factor on the left.
Matrix choi_matrix(const Superoperator& phi);
Matrix choi_matrix(const KrausMap& k);

struct ChoiReport {
  Matrix choi;
  double min_eigenvalue = 0.0;
  bool completely_positive = false;
};
ChoiReport choi_and_cp_check(const Superoperator& phi, double psd_tol = -1.0);
ChoiReport choi_and_cp_check(const KrausMap& k, double psd_tol = -1.0);

struct SpectrumReport {
  Vector eigenvalues;
  double spectral_radius = 0.0;
};
SpectrumReport superoperator_spectrum(const Superoperator& phi);

struct PerronData {
  double spectral_radius = 0.0;
  Matrix right_vector;   // Hermitian part, phase-fixed
  Matrix left_density;   // trace-normalized Hermitian part
  int geometric_multiplicity = 0;
  std::vector<Complex> peripheral_eigenvalues;
  bool right_strictly_positive = false;
  bool left_strictly_positive = false;
  bool conditioning_warning = false;
};

struct PositivityStructure {
  bool irreducible = false;
  bool primitive = false;
  PerronData perron;
};

// Spectral Perron-Frobenius classification of a positive map: the map
// is irreducible iff its spectral radius is a geometrically simple
// eigenvalue of the map and its adjoint with strictly positive
// Hermitian eigenvectors; primitive iff additionally no other
// eigenvalue sits on the peripheral circle.
PositivityStructure classify_positivity_structure(
    const Superoperator& phi, double peripheral_tol = 1e-8,
    double eig_cluster_tol = 1e-7, double strict_pos_tol = 1e-8);

struct CpOrderResult {
  bool finite = false;
  double beta = 0.0;
  double witness_min_eigenvalue = 0.0;  // min eig of Choi(beta Psi - Phi)
};

// Minimal beta >= 0 with Phi <=_CP beta Psi, i.e. Choi(beta Psi - Phi)
// PSD; not finite when supp Choi(Phi) is not contained in supp Choi(Psi).
CpOrderResult cp_order_gap(const Superoperator& phi, const Superoperator& psi,
                           double psd_tol = -1.0);

struct RateCurve {
  std::vector<double> values;  // (1/n) log phi(Phi^n(x)), n = 1..n_max
  double limit_log_r = 0.0;
  double deviation_at_end = 0.0;
};

// Finite-n convergence curve of (1/n) log phi(Phi^n(x)) toward the log
// spectral radius; phi is the functional Tr(weight .), x must be
// strictly positive.
RateCurve asymptotic_rate_curve(const Superoperator& phi,
                                const Matrix& weight, const Matrix& x,
                                int n_max);

}  // namespace spinchain

#endif
