#include "spinchain/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spinchain {

double scale_tol(const Matrix& a, double base) {
  double m = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
  return base * static_cast<double>(std::max<Index>(a.rows(), 1)) *
         std::max(m, 1.0);
}

double hermiticity_error(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (tol < 0) tol = scale_tol(a);
  return hermiticity_error(a) <= tol;
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": matrix is not square");
}

void require_hermitian(const Matrix& a, double tol) {
  require_square(a, "require_hermitian");
  if (tol < 0) tol = scale_tol(a);
  if (hermiticity_error(a) > tol)
    throw std::invalid_argument("operator is not Hermitian within tolerance");
}

void require_density(const Matrix& a, double psd_tol, double trace_tol) {
  require_hermitian(a, psd_tol);
  if (psd_tol < 0) psd_tol = scale_tol(a);
  if (trace_tol < 0) trace_tol = scale_tol(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw std::invalid_argument("density operator has a negative eigenvalue");
  if (std::abs(a.trace().real() - 1.0) > trace_tol ||
      std::abs(a.trace().imag()) > trace_tol)
    throw std::invalid_argument("density operator trace differs from 1");
}

Matrix identity(Index d) { return Matrix::Identity(d, d); }

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix tensor_power(const Matrix& a, int k) {
  if (k < 1) throw std::invalid_argument("tensor_power: k must be >= 1");
  Matrix out = a;
  for (int i = 1; i < k; ++i) out = tensor_product(out, a);
  return out;
}

Matrix partial_trace(const Matrix& x, const std::vector<Index>& dims,
                     const std::vector<int>& keep) {
  require_square(x, "partial_trace");
  Index total = 1;
  for (Index d : dims) total *= d;
  if (total != x.rows())
    throw DimensionError("partial_trace: factor dimensions do not match");

  const int nf = static_cast<int>(dims.size());
  std::vector<bool> kept(nf, false);
  for (int f : keep) {
    if (f < 0 || f >= nf)
      throw DimensionError("partial_trace: keep index out of range");
    kept[f] = true;
  }

  // Strides in row-major semantic order (factor 0 most significant).
  std::vector<Index> stride(nf, 1);
  for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

  Index keep_dim = 1, drop_dim = 1;
  std::vector<int> keep_f, drop_f;
  for (int f = 0; f < nf; ++f) {
    if (kept[f]) {
      keep_dim *= dims[f];
      keep_f.push_back(f);
    } else {
      drop_dim *= dims[f];
      drop_f.push_back(f);
    }
  }

  auto expand = [&](Index packed, const std::vector<int>& fs) {
    Index idx = 0;
    for (int i = static_cast<int>(fs.size()) - 1; i >= 0; --i) {
      int f = fs[i];
      idx += (packed % dims[f]) * stride[f];
      packed /= dims[f];
    }
    return idx;
  };

  Matrix out = Matrix::Zero(keep_dim, keep_dim);
  for (Index i = 0; i < keep_dim; ++i) {
    Index bi = expand(i, keep_f);
    for (Index j = 0; j < keep_dim; ++j) {
      Index bj = expand(j, keep_f);
      Complex s = 0.0;
      for (Index k = 0; k < drop_dim; ++k) {
        Index bk = expand(k, drop_f);
        s += x(bi + bk, bj + bk);
      }
      out(i, j) = s;
    }
  }
  return out;
}

Matrix shift_embed(const Matrix& a, int site, int n, Index d) {
  require_square(a, "shift_embed");
  int r = 0;
  Index dim = 1;
  while (dim < a.rows()) {
    dim *= d;
    ++r;
  }
  if (dim != a.rows())
    throw DimensionError("shift_embed: dim(a) is not a power of d");
  if (site < 0 || site + r > n)
    throw DimensionError("shift_embed: window exceeds chain length");
  Index left = 1, right = 1;
  for (int k = 0; k < site; ++k) left *= d;
  for (int k = site + r; k < n; ++k) right *= d;
  Matrix out = a;
  if (left > 1) out = tensor_product(identity(left), out);
  if (right > 1) out = tensor_product(out, identity(right));
  return out;
}

Matrix SpectralDecomposition::reconstruct() const {
  Matrix out = Matrix::Zero(projectors.front().rows(), projectors.front().cols());
  for (size_t i = 0; i < projectors.size(); ++i)
    out += eigenvalues[static_cast<Index>(i)] * projectors[i];
  return out;
}

SpectralDecomposition spectral_decomposition(const Matrix& a,
                                             double merge_tol) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  const RealVector& ev = es.eigenvalues();
  const Matrix& u = es.eigenvectors();

  SpectralDecomposition out;
  std::vector<double> vals;
  Index i = 0;
  while (i < ev.size()) {
    Index j = i + 1;
    while (j < ev.size() && ev[j] - ev[j - 1] <= merge_tol) ++j;
    Matrix block = u.middleCols(i, j - i);
    out.projectors.push_back(block * block.adjoint());
    vals.push_back(ev.segment(i, j - i).mean());
    i = j;
  }
  out.eigenvalues = Eigen::Map<RealVector>(vals.data(),
                                           static_cast<Index>(vals.size()));
  return out;
}

namespace {

template <class F>
Matrix hermitian_calculus(const Matrix& a, F f) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  RealVector mapped(es.eigenvalues().size());
  for (Index i = 0; i < mapped.size(); ++i) mapped[i] = f(es.eigenvalues()[i]);
  return es.eigenvectors() * mapped.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

Matrix matrix_exp(const Matrix& a) {
  return hermitian_calculus(a, [](double x) { return std::exp(x); });
}

Matrix matrix_log(const Matrix& a, double support_tol) {
  if (support_tol < 0) support_tol = scale_tol(a);
  return hermitian_calculus(a, [support_tol](double x) {
    return x > support_tol ? std::log(x) : 0.0;
  });
}

Matrix matrix_power(const Matrix& a, double t, double support_tol) {
  if (support_tol < 0) support_tol = scale_tol(a);
  return hermitian_calculus(a, [t, support_tol](double x) {
    if (x <= support_tol) {
      if (x < -support_tol)
        throw std::invalid_argument(
            "matrix_power: negative eigenvalue below tolerance");
      return 0.0;  // 0^t := 0 (support convention, including t <= 0)
    }
    return std::pow(x, t);
  });
}

Matrix support_projection(const Matrix& a, double tol) {
  if (tol < 0) tol = scale_tol(a);
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.eigenvalues().minCoeff() < -tol)
    throw std::invalid_argument(
        "support_projection: operator is not positive semidefinite");
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > tol)
      out += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  return out;
}

double trace_norm(const Matrix& a) {
  require_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()[0];
}

double relative_entropy(const Matrix& phi, const Matrix& omega,
                        double support_tol) {
  if (phi.rows() != omega.rows())
    throw DimensionError("relative_entropy: dimension mismatch");
  if (support_tol < 0)
    support_tol = std::max(scale_tol(phi), scale_tol(omega));

  Matrix p_omega = support_projection(omega, support_tol);
  Matrix complement = identity(omega.rows()) - p_omega;
  double leak = (complement * phi * complement).trace().real();
  if (leak > std::sqrt(support_tol))
    return std::numeric_limits<double>::infinity();

  Matrix log_phi = matrix_log(phi, support_tol);
  Matrix log_omega = matrix_log(omega, support_tol);
  return (phi * (log_phi - log_omega)).trace().real();
}

}  // namespace spinchain
