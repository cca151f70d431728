#include "bcpace/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "bcpace/error.hpp"

namespace bcpace {

namespace {

constexpr double kSingularRelTol = 1e-12;
constexpr int kQrIterationsPerEigenvalue = 60;
constexpr int kPowerIterationBudget = 10000;
constexpr double kPowerIterationTol = 1e-12;

void require(bool ok, ErrorCode code, const char* msg) {
  if (!ok) throw Error(code, msg);
}

void require_square(const Matrix& m, const char* who) {
  if (!m.square() || m.empty()) {
    throw Error(ErrorCode::dimension_mismatch, std::string(who) + ": matrix must be square and non-empty");
  }
}

struct LuFactors {
  Matrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

LuFactors lu_decompose(const Matrix& m) {
  require_square(m, "lu");
  const std::size_t n = m.rows();
  const double threshold = kSingularRelTol * std::max(frobenius_norm(m), 1e-300);
  LuFactors f{m, std::vector<std::size_t>(n), 1};
  std::iota(f.perm.begin(), f.perm.end(), 0);
  Matrix& a = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (!(std::abs(a(piv, k)) > threshold)) {
      throw Error(ErrorCode::singular_matrix, "pivot below 1e-12*||M|| at column " + std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) /= a(k, k);
      const double l = a(i, k);
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return f;
}

Vector lu_substitute(const LuFactors& f, std::span<const double> v) {
  const std::size_t n = f.lu.rows();
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = v[f.perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

// Balancing by powers of two (Parlett-Reinsch).
void balance(Matrix& a) {
  const std::size_t n = a.rows();
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity
// transforms. Entries below the subdiagonal are zeroed on exit.
void to_hessenberg(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t m = 1; m + 1 < n; ++m) {
    double x = 0.0;
    std::size_t piv = m;
    for (std::size_t j = m; j < n; ++j) {
      if (std::abs(a(j, m - 1)) > std::abs(x)) {
        x = a(j, m - 1);
        piv = j;
      }
    }
    if (piv != m) {
      for (std::size_t j = m - 1; j < n; ++j) std::swap(a(piv, j), a(m, j));
      for (std::size_t j = 0; j < n; ++j) std::swap(a(j, piv), a(j, m));
    }
    if (x == 0.0) continue;
    for (std::size_t i = m + 1; i < n; ++i) {
      double y = a(i, m - 1);
      if (y == 0.0) continue;
      y /= x;
      a(i, m - 1) = y;
      for (std::size_t j = m; j < n; ++j) a(i, j) -= y * a(m, j);
      for (std::size_t j = 0; j < n; ++j) a(j, m) += y * a(j, i);
    }
  }
  for (std::size_t i = 2; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < i; ++j) a(i, j) = 0.0;
  }
}

double sign_of(double magnitude, double s) { return s >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude); }

// Francis double-shift QR on an upper Hessenberg matrix. Indices below are
// 1-based through the accessor `h` to keep the classic formulation intact.
ComplexList hessenberg_qr(Matrix& mat) {
  const int n = static_cast<int>(mat.rows());
  auto h = [&mat](int i, int j) -> double& { return mat(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)); };
  std::vector<double> wr(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> wi(static_cast<std::size_t>(n) + 1, 0.0);

  double anorm = 0.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = std::max(i - 1, 1); j <= n; ++j) anorm += std::abs(h(i, j));
  }

  int nn = n;
  double t = 0.0;
  while (nn >= 1) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l >= 2; --l) {
        double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(h(l, l - 1)) + s == s) {
          h(l, l - 1) = 0.0;
          break;
        }
      }
      double x = h(nn, nn);
      if (l == nn) {
        wr[nn] = x + t;
        wi[nn] = 0.0;
        --nn;
      } else {
        double y = h(nn - 1, nn - 1);
        double w = h(nn, nn - 1) * h(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            wr[nn - 1] = wr[nn] = x + z;
            if (z != 0.0) wr[nn] = x - w / z;
            wi[nn - 1] = wi[nn] = 0.0;
          } else {
            wr[nn - 1] = wr[nn] = x + p;
            wi[nn - 1] = z;
            wi[nn] = -z;
          }
          nn -= 2;
        } else {
          if (its == kQrIterationsPerEigenvalue) {
            throw Error(ErrorCode::no_convergence, "QR iteration budget exhausted");
          }
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 1; i <= nn; ++i) h(i, i) -= x;
            const double s = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
          for (; m >= l; --m) {
            z = h(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
            q = h(m + 1, m + 1) - z - r - s;
            r = h(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) + std::abs(h(m + 1, m + 1)));
            if (u + v == v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            h(i, i - 2) = 0.0;
            if (i != m + 2) h(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {
            if (k != m) {
              p = h(k, k - 1);
              q = h(k + 1, k - 1);
              r = 0.0;
              if (k != nn - 1) r = h(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) h(k, k - 1) = -h(k, k - 1);
            } else {
              h(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = h(k, j) + q * h(k + 1, j);
              if (k != nn - 1) {
                p += r * h(k + 2, j);
                h(k + 2, j) -= p * z;
              }
              h(k + 1, j) -= p * y;
              h(k, j) -= p * x;
            }
            const int mmin = std::min(nn, k + 3);
            for (int i = l; i <= mmin; ++i) {
              p = x * h(i, k) + y * h(i, k + 1);
              if (k != nn - 1) {
                p += z * h(i, k + 2);
                h(i, k + 2) -= p * r;
              }
              h(i, k + 1) -= p * q;
              h(i, k) -= p;
            }
          }
        }
      }
    } while (l < nn - 1);
  }

  ComplexList out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) out.emplace_back(wr[static_cast<std::size_t>(i)], wi[static_cast<std::size_t>(i)]);
  return out;
}

using CMatrix = std::vector<std::vector<std::complex<double>>>;

// Complex LU solve with partial pivoting; pivots are floored at `floor` so
// that inverse iteration with a near-exact shift stays finite.
std::vector<std::complex<double>> complex_solve(CMatrix a, std::vector<std::complex<double>> b, double floor) {
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    }
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    if (std::abs(a[k][k]) < floor) a[k][k] = floor;
    for (std::size_t i = k + 1; i < n; ++i) {
      const auto l = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= l * a[k][j];
      b[i] -= l * b[k];
    }
  }
  std::vector<std::complex<double>> x(n);
  for (std::size_t i = n; i-- > 0;) {
    auto s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

std::vector<std::complex<double>> eigenvector_for(const Matrix& m, std::complex<double> lambda, std::size_t seed_index,
                                                  const std::vector<std::vector<std::complex<double>>>& previous) {
  const std::size_t n = m.rows();
  const double scale = std::max(frobenius_norm(m), 1.0);
  CMatrix shifted(n, std::vector<std::complex<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) shifted[i][j] = m(i, j);
    shifted[i][i] -= lambda;
  }
  std::vector<std::complex<double>> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = (i == seed_index % n ? 1.0 : 0.0) + 1e-3 * static_cast<double>((i * 7 + seed_index * 3) % 11) / 11.0;
  }
  auto project_out = [&](std::vector<std::complex<double>>& x) {
    for (const auto& p : previous) {
      std::complex<double> proj{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) proj += std::conj(p[i]) * x[i];
      for (std::size_t i = 0; i < n; ++i) x[i] -= proj * p[i];
    }
  };
  auto normalize = [&](std::vector<std::complex<double>>& x) {
    double s = 0.0;
    for (const auto& e : x) s += std::norm(e);
    s = std::sqrt(s);
    if (s > 0.0) {
      for (auto& e : x) e /= s;
    }
  };
  project_out(v);
  normalize(v);
  for (int it = 0; it < 3; ++it) {
    v = complex_solve(shifted, v, 1e-14 * scale);
    project_out(v);
    normalize(v);
  }
  return v;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, ErrorCode::dimension_mismatch, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> entries) {
  Matrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == m.cols(), ErrorCode::dimension_mismatch, "ragged matrix rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Vector Matrix::row(std::size_t r) const { return Vector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_), data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)); }

Vector Matrix::col(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::dimension_mismatch, "matrix sum shape");
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  }
  return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) { return a + (-1.0) * b; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::dimension_mismatch, "matrix product shape");
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix r = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) *= s;
  }
  return r;
}

Vector operator*(const Matrix& a, std::span<const double> v) {
  require(a.cols() == v.size(), ErrorCode::dimension_mismatch, "matrix-vector shape");
  Vector r(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Vector add(std::span<const double> a, std::span<const double> b) { return axpy(a, 1.0, b); }
Vector sub(std::span<const double> a, std::span<const double> b) { return axpy(a, -1.0, b); }

Vector scaled(double s, std::span<const double> v) {
  Vector r(v.begin(), v.end());
  for (auto& e : r) e *= s;
  return r;
}

Vector axpy(std::span<const double> a, double s, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch, "vector length");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorCode::dimension_mismatch, "vector length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

Vector unit_vector(std::size_t n, std::size_t k) {
  Vector e(n, 0.0);
  e.at(k) = 1.0;
  return e;
}

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double e : m.data()) s += e * e;
  return std::sqrt(s);
}

bool all_finite(const Matrix& m) { return all_finite(m.data()); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
}

Vector lu_solve(const Matrix& m, std::span<const double> v) {
  require_square(m, "lu_solve");
  require(v.size() == m.rows(), ErrorCode::dimension_mismatch, "lu_solve: rhs length");
  return lu_substitute(lu_decompose(m), v);
}

Matrix inverse(const Matrix& m) {
  const auto f = lu_decompose(m);
  const std::size_t n = m.rows();
  Matrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const Vector col = lu_substitute(f, unit_vector(n, j));
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

double determinant(const Matrix& m) {
  require_square(m, "determinant");
  try {
    const auto f = lu_decompose(m);
    double d = f.sign;
    for (std::size_t i = 0; i < m.rows(); ++i) d *= f.lu(i, i);
    return d;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::singular_matrix) return 0.0;
    throw;
  }
}

ComplexList eigenvalues(const Matrix& m) {
  require_square(m, "eigenvalues");
  require(m.rows() <= 16, ErrorCode::dimension_mismatch, "eigenvalues: dimension above 16");
  require(all_finite(m), ErrorCode::invalid_argument, "eigenvalues: non-finite entries");
  Matrix a = m;
  balance(a);
  to_hessenberg(a);
  ComplexList ev = hessenberg_qr(a);
  // Order conjugate pairs as (+im, -im).
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    if (ev[i].imag() < 0.0 && ev[i + 1].imag() > 0.0 && std::abs(ev[i] - std::conj(ev[i + 1])) <= 1e-12 * (1.0 + std::abs(ev[i]))) {
      std::swap(ev[i], ev[i + 1]);
      ++i;
    } else if (ev[i].imag() > 0.0) {
      ++i;
    }
  }
  return ev;
}

double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& l : eigenvalues(m)) r = std::max(r, std::abs(l));
  return r;
}

std::optional<Matrix> real_eigenvector_basis(const Matrix& m) {
  const ComplexList ev = eigenvalues(m);
  const std::size_t n = m.rows();
  const double scale = std::max(frobenius_norm(m), 1.0);
  Matrix basis(n, n);
  std::vector<bool> used(n, false);
  std::vector<std::vector<std::complex<double>>> found;
  std::vector<std::complex<double>> found_values;
  std::size_t column = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) continue;
    used[i] = true;
    const auto lambda = ev[i];
    std::vector<std::vector<std::complex<double>>> same;
    for (std::size_t k = 0; k < found.size(); ++k) {
      if (std::abs(found_values[k] - lambda) <= 1e-8 * scale) same.push_back(found[k]);
    }
    auto v = eigenvector_for(m, lambda, i, same);
    // A repeated eigenvalue without a second eigenvector leaves a vector
    // that inverse iteration cannot fix: the matrix is defective.
    double residual = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      std::complex<double> acc = -lambda * v[r];
      for (std::size_t k = 0; k < n; ++k) acc += m(r, k) * v[k];
      residual = std::max(residual, std::abs(acc));
    }
    if (residual > 1e-8 * scale) return std::nullopt;
    found.push_back(v);
    found_values.push_back(lambda);
    const bool complex_pair = std::abs(lambda.imag()) > 1e-12 * scale;
    if (!complex_pair) {
      // Rotate the phase so the largest component is real, then drop the
      // (numerically zero) imaginary part.
      std::size_t big = 0;
      for (std::size_t k = 1; k < n; ++k) {
        if (std::abs(v[k]) > std::abs(v[big])) big = k;
      }
      const auto phase = std::abs(v[big]) / v[big];
      for (std::size_t k = 0; k < n; ++k) basis(k, column) = (v[k] * phase).real();
      ++column;
      continue;
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!used[j] && std::abs(ev[j] - std::conj(lambda)) <= 1e-8 * scale) {
        used[j] = true;
        break;
      }
    }
    if (column + 2 > n) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) {
      basis(k, column) = v[k].real();
      basis(k, column + 1) = v[k].imag();
    }
    column += 2;
  }
  if (column != n) return std::nullopt;
  // Reject numerically singular bases (defective matrices).
  Matrix normalized = basis;
  for (std::size_t j = 0; j < n; ++j) {
    const double cn = norm2(basis.col(j));
    if (cn == 0.0) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) normalized(k, j) /= cn;
  }
  if (std::abs(determinant(normalized)) < 1e-8) return std::nullopt;
  return basis;
}

double operator_norm(const Matrix& m) {
  require(all_finite(m), ErrorCode::invalid_argument, "operator_norm: non-finite entries");
  if (m.empty()) return 0.0;
  const Matrix gram = m.transposed() * m;
  const std::size_t n = gram.rows();
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * static_cast<double>((i * 37 + 11) % 17) / 17.0;
  double vn = norm2(v);
  for (auto& e : v) e /= vn;
  double estimate = dot(v, gram * std::span<const double>(v));
  for (int it = 0; it < kPowerIterationBudget; ++it) {
    Vector w = gram * std::span<const double>(v);
    const double wn = norm2(w);
    if (wn == 0.0) return 0.0;
    for (auto& e : w) e /= wn;
    const double next = dot(w, gram * std::span<const double>(w));
    v = std::move(w);
    const bool converged = std::abs(next - estimate) <= kPowerIterationTol * std::max(next, 1e-300);
    estimate = next;
    if (converged) break;
  }
  return std::sqrt(std::max(estimate, 0.0));
}

double s_norm(const Matrix& m, const Matrix& s) {
  require_square(m, "s_norm");
  require(s.rows() == m.rows() && s.square(), ErrorCode::dimension_mismatch, "s_norm: S shape");
  return operator_norm(s * m * inverse(s));
}

}  // namespace bcpace
