#ifndef SPINCHAIN_DENSE_HPP
#define SPINCHAIN_DENSE_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinchain {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Brute-force cap on the total Hilbert space dimension d_A^n.
inline constexpr Index kDefaultCap = 4096;

struct CapExceededError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Scale-aware default tolerance: base * dim * max|entry|.
double scale_tol(const Matrix& a, double base = 1e-9);

double hermiticity_error(const Matrix& a);
bool is_hermitian(const Matrix& a, double tol = -1.0);
void require_square(const Matrix& a, const char* what);
void require_hermitian(const Matrix& a, double tol = -1.0);
// Throws unless a is PSD (within psd_tol) with unit trace (within trace_tol).
void require_density(const Matrix& a, double psd_tol = -1.0,
                     double trace_tol = -1.0);

Matrix identity(Index d);

// Kronecker product, A acting on the left (more significant) factor.
Matrix tensor_product(const Matrix& a, const Matrix& b);
Matrix tensor_power(const Matrix& a, int k);

// Partial trace of x over the factors not listed in `keep`.
// `dims` are the factor dimensions left to right; their product must
// equal dim(x). `keep` holds the (sorted, unique) indices of surviving
// factors.
Matrix partial_trace(const Matrix& x, const std::vector<Index>& dims,
                     const std::vector<int>& keep);

// Identity padding: places the window operator a (acting on d^r sites)
// at positions [site, site + r) inside a chain of n d-level sites.
Matrix shift_embed(const Matrix& a, int site, int n, Index d);

// Eigenvalues in ascending order with orthogonal projectors onto the
// (merged) eigenspaces. merge_tol > 0 groups nearby eigenvalues.
struct SpectralDecomposition {
  RealVector eigenvalues;
  std::vector<Matrix> projectors;

  Matrix reconstruct() const;
};

SpectralDecomposition spectral_decomposition(const Matrix& a,
                                             double merge_tol = 0.0);

Matrix matrix_exp(const Matrix& a);
// log on the support: eigenvalues <= support_tol are dropped.
Matrix matrix_log(const Matrix& a, double support_tol = -1.0);
// A^t with the convention 0^t := 0 (pseudo-inverse powers for t < 0).
Matrix matrix_power(const Matrix& a, double t, double support_tol = -1.0);
// Projection onto the span of eigenvectors with eigenvalue > tol.
Matrix support_projection(const Matrix& a, double tol = -1.0);

// Sum of absolute eigenvalues of a Hermitian operator.
double trace_norm(const Matrix& a);
// Largest singular value.
double operator_norm(const Matrix& a);

// Umegaki relative entropy Tr phi (log phi - log omega) with logs on
// supports; +infinity when supp phi is not contained in supp omega.
double relative_entropy(const Matrix& phi, const Matrix& omega,
                        double support_tol = -1.0);

}  // namespace spinchain

#endif
