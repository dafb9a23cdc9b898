#pragma once

// Dense real/complex linear algebra kernel: matrix type, determinants and
// the eigensolvers used as oracles by the construction modules.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spectralforge::numkit {

using Complex = std::complex<double>;

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline std::string shape_str(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace detail

/// Row-major dense real matrix. Entries are validated to be finite when the
/// matrix is built from user-supplied data.
class DenseMatrix {
  public:
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
        detail::require(rows >= 1 && cols >= 1, "DenseMatrix: rows and cols must be >= 1");
    }

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        detail::require(rows >= 1 && cols >= 1, "DenseMatrix: rows and cols must be >= 1");
        detail::require(entries_.size() == rows * cols,
                        "DenseMatrix: entry count " + std::to_string(entries_.size()) +
                            " does not match shape " + detail::shape_str(rows, cols));
        for (double x : entries_) {
            detail::require(std::isfinite(x), "DenseMatrix: non-finite entry");
        }
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        detail::require(rows.size() > 0, "DenseMatrix: empty row list");
        std::size_t cols = rows.begin()->size();
        std::vector<double> data;
        data.reserve(rows.size() * cols);
        for (const auto& row : rows) {
            detail::require(row.size() == cols, "DenseMatrix: ragged row list");
            data.insert(data.end(), row.begin(), row.end());
        }
        return DenseMatrix(rows.size(), cols, std::move(data));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }

    std::span<const double> data() const { return entries_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(entries_).subspan(i * cols_, cols_);
    }

    double trace() const {
        detail::require(square(), "trace: matrix not square");
        double t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_norm() const {
        double m = 0.0;
        for (double x : entries_) m = std::max(m, std::abs(x));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double x : entries_) s += x * x;
        return std::sqrt(s);
    }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    // Largest |a_ij - a_ji|; zero for non-square is meaningless, so guarded.
    double asymmetry() const {
        detail::require(square(), "asymmetry: matrix not square");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    bool is_symmetric(double tol = 1e-12) const { return square() && asymmetry() <= tol; }

    DenseMatrix& operator+=(const DenseMatrix& o) {
        detail::require(rows_ == o.rows_ && cols_ == o.cols_,
                        "matrix add: shape mismatch (" + detail::shape_str(rows_, cols_) +
                            " vs " + detail::shape_str(o.rows_, o.cols_) + ")");
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
        return *this;
    }

    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }

    DenseMatrix scaled(double s) const {
        DenseMatrix r(rows_, cols_);
        for (std::size_t i = 0; i < entries_.size(); ++i) r.entries_[i] = s * entries_[i];
        return r;
    }

  private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> entries_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

/// Canonical eigenvalue order: descending real part, ties by descending
/// imaginary part. Fixed so that all emitted spectra are deterministic.
inline bool canonical_less(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
}

/// Multiset of eigenvalues, optionally with a distinguished Perron root.
struct Spectrum {
    std::vector<Complex> values;
    std::optional<std::size_t> perron_index;

    Spectrum() = default;
    explicit Spectrum(std::vector<Complex> vals,
                      std::optional<std::size_t> perron = std::nullopt)
        : values(std::move(vals)), perron_index(perron) {
        validate();
    }
    static Spectrum of_reals(std::initializer_list<double> reals) {
        std::vector<Complex> v;
        for (double x : reals) v.emplace_back(x, 0.0);
        return Spectrum(std::move(v));
    }

    std::size_t size() const { return values.size(); }

    void validate() const {
        for (Complex z : values) {
            detail::require(std::isfinite(z.real()) && std::isfinite(z.imag()),
                            "Spectrum: non-finite eigenvalue");
        }
        if (perron_index) {
            detail::require(*perron_index < values.size(), "Spectrum: perron_index out of range");
            double p = std::abs(values[*perron_index]);
            for (Complex z : values) {
                detail::require(p >= std::abs(z) - 1e-9,
                                "Spectrum: designated Perron root is not maximal in modulus");
            }
        }
    }

    /// Marks the largest-modulus entry; exact modulus ties resolve toward the
    /// larger real part, so +r wins over -r for the Perron designation.
    void set_perron_at_max() {
        if (values.empty()) return;
        std::size_t best = 0;
        for (std::size_t i = 1; i < values.size(); ++i) {
            double mi = std::abs(values[i]), mb = std::abs(values[best]);
            if (mi > mb || (mi == mb && values[i].real() > values[best].real())) best = i;
        }
        perron_index = best;
        validate();
    }

    std::vector<Complex> canonical_sorted() const {
        std::vector<Complex> v = values;
        std::sort(v.begin(), v.end(), canonical_less);
        return v;
    }

    Complex sum() const {
        Complex s = 0.0;
        for (Complex z : values) s += z;
        return s;
    }
};

/// Real eigenvalue with its unit eigenvector. The vector is normalized on
/// construction, so the unit-norm invariant always holds.
struct EigenPair {
    double value = 0.0;
    std::vector<double> vector;

    EigenPair() = default;
    EigenPair(double val, std::vector<double> vec) : value(val), vector(std::move(vec)) {
        detail::require(std::isfinite(value), "EigenPair: non-finite eigenvalue");
        detail::require(!vector.empty(), "EigenPair: empty eigenvector");
        double n = norm2(vector);
        detail::require(std::isfinite(n) && n > 0.0, "EigenPair: eigenvector has zero norm");
        for (double& x : vector) x /= n;
    }
};

// ---------------------------------------------------------------------------
// Basic operations
// ---------------------------------------------------------------------------

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    detail::require(a.cols() == b.rows(),
                    "matmul: dimension mismatch (" + detail::shape_str(a.rows(), a.cols()) +
                        " vs " + detail::shape_str(b.rows(), b.cols()) + ")");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

inline DenseMatrix outer(std::span<const double> u, std::span<const double> v, double scale) {
    detail::require(!u.empty() && !v.empty(), "outer: empty input vector");
    DenseMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        double su = scale * u[i];
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = su * v[j];
    }
    return m;
}

inline DenseMatrix matvec_as_column(const DenseMatrix& a, std::span<const double> x) {
    detail::require(a.cols() == x.size(), "matvec: dimension mismatch");
    DenseMatrix y(a.rows(), 1);
    for (std::size_t i = 0; i < a.rows(); ++i) y(i, 0) = dot(a.row(i), x);
    return y;
}

inline std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
    detail::require(a.cols() == x.size(), "matvec: dimension mismatch");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

/// 2-norm of (a*v - value*v); the eigenpair residual used as an input gate.
inline double eigenpair_residual(const DenseMatrix& a, const EigenPair& p) {
    std::vector<double> av = matvec(a, p.vector);
    double s = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        double d = av[i] - p.value * p.vector[i];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Determinant of m via real LU with partial pivoting.
inline double lu_det(const DenseMatrix& m) {
    detail::require(m.square(), "lu_det: matrix not square (" +
                                    detail::shape_str(m.rows(), m.cols()) + ")");
    std::size_t n = m.rows();
    std::vector<double> a(m.data().begin(), m.data().end());
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(at(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(at(piv, j), at(col, j));
            det = -det;
        }
        det *= at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = at(r, col) / at(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) at(r, j) -= f * at(col, j);
        }
    }
    return det;
}

/// det(m - shift*I) via complex LU with partial pivoting. An exact zero pivot
/// short-circuits to a zero determinant.
inline Complex lu_det_complex(const DenseMatrix& m, Complex shift) {
    detail::require(m.square(), "lu_det_complex: matrix not square (" +
                                    detail::shape_str(m.rows(), m.cols()) + ")");
    std::size_t n = m.rows();
    std::vector<Complex> a(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i * n + j] = Complex(m(i, j), 0.0) - (i == j ? shift : Complex(0.0));
    auto at = [&](std::size_t i, std::size_t j) -> Complex& { return a[i * n + j]; };
    Complex det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(at(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            double v = std::abs(at(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return Complex(0.0, 0.0);
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(at(piv, j), at(col, j));
            det = -det;
        }
        det *= at(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            Complex f = at(r, col) / at(col, col);
            if (f == Complex(0.0)) continue;
            for (std::size_t j = col + 1; j < n; ++j) at(r, j) -= f * at(col, j);
        }
    }
    return det;
}

// ---------------------------------------------------------------------------
// Symmetric eigensolver (cyclic Jacobi)
// ---------------------------------------------------------------------------

struct SymmetricEigen {
    Spectrum spectrum;     // all real, canonical (descending) order
    DenseMatrix vectors;   // column j is the eigenvector of spectrum.values[j]
};

/// Cyclic Jacobi eigensolver for symmetric matrices. Input must be symmetric
/// to 1e-12 entrywise; iteration runs on the symmetrized half-sum. Fails
/// after 100 sweeps.
inline SymmetricEigen jacobi_eigs(const DenseMatrix& m, double tol = 1e-10) {
    detail::require(m.square(), "jacobi_eigs: matrix not square (" +
                                    detail::shape_str(m.rows(), m.cols()) + ")");
    detail::require(m.asymmetry() <= 1e-12,
                    "jacobi_eigs: matrix asymmetric beyond 1e-12 (asymmetry " +
                        std::to_string(m.asymmetry()) + ")");
    const std::size_t n = m.rows();
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + m(j, i));
    DenseMatrix v = DenseMatrix::identity(n);

    auto off_fro = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    const double scale = std::max(1.0, a.frobenius_norm());
    const double threshold = tol * scale;
    bool converged = off_fro() <= threshold;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e15) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double app = a(p, p), aqq = a(q, q);
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    double arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp - s * arq;
                    a(p, r) = a(r, p);
                    a(r, q) = s * arp + c * arq;
                    a(q, r) = a(r, q);
                }
                for (std::size_t r = 0; r < n; ++r) {
                    double vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
        converged = off_fro() <= threshold;
    }
    if (!converged) {
        throw std::runtime_error("jacobi_eigs: no convergence within 100 sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    std::vector<Complex> vals(n);
    DenseMatrix vecs(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        vals[j] = Complex(a(order[j], order[j]), 0.0);
        for (std::size_t i = 0; i < n; ++i) vecs(i, j) = v(i, order[j]);
    }
    return SymmetricEigen{Spectrum(std::move(vals)), std::move(vecs)};
}

// ---------------------------------------------------------------------------
// Small general eigensolver (Hessenberg + shifted complex QR)
// ---------------------------------------------------------------------------

namespace detail {

// Householder reduction of a real square matrix to upper Hessenberg form.
inline std::vector<double> hessenberg_reduce(const DenseMatrix& m) {
    const std::size_t n = m.rows();
    std::vector<double> h(m.data().begin(), m.data().end());
    auto at = [&](std::size_t i, std::size_t j) -> double& { return h[i * n + j]; };
    if (n < 3) return h;
    std::vector<double> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double xnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) xnorm += at(i, k) * at(i, k);
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        double alpha = at(k + 1, k) >= 0.0 ? -xnorm : xnorm;
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = at(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;
        // left: rows k+1..n-1
        for (std::size_t j = k; j < n; ++j) {
            double w = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) w += v[i] * at(i, j);
            w *= 2.0 / vnorm2;
            for (std::size_t i = k + 1; i < n; ++i) at(i, j) -= w * v[i];
        }
        // right: cols k+1..n-1
        for (std::size_t i = 0; i < n; ++i) {
            double w = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) w += at(i, j) * v[j];
            w *= 2.0 / vnorm2;
            for (std::size_t j = k + 1; j < n; ++j) at(i, j) -= w * v[j];
        }
        at(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) at(i, k) = 0.0;
    }
    return h;
}

// Eigenvalues of a complex 2x2 matrix via the quadratic formula.
inline std::pair<Complex, Complex> eig2(Complex a, Complex b, Complex c, Complex d) {
    Complex half_tr = 0.5 * (a + d);
    Complex disc = std::sqrt(half_tr * half_tr - (a * d - b * c));
    return {half_tr + disc, half_tr - disc};
}

}  // namespace detail

/// Eigenvalues of a real square matrix of dimension <= 64 via Hessenberg
/// reduction followed by Wilkinson-shifted complex QR iteration. Returns
/// the full complex spectrum in canonical order.
inline Spectrum qr_eigs_small(const DenseMatrix& m) {
    detail::require(m.square(), "qr_eigs_small: matrix not square (" +
                                    detail::shape_str(m.rows(), m.cols()) + ")");
    const std::size_t n = m.rows();
    detail::require(n <= 64, "qr_eigs_small: dimension " + std::to_string(n) +
                                 " exceeds the 64 limit");
    std::vector<Complex> vals;
    vals.reserve(n);
    if (n == 1) {
        vals.emplace_back(m(0, 0), 0.0);
        std::sort(vals.begin(), vals.end(), canonical_less);
        return Spectrum(std::move(vals));
    }

    std::vector<double> hr = detail::hessenberg_reduce(m);
    std::vector<Complex> h(n * n);
    for (std::size_t i = 0; i < n * n; ++i) h[i] = Complex(hr[i], 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> Complex& { return h[i * n + j]; };

    const double eps = std::numeric_limits<double>::epsilon();
    const std::size_t max_iter = 30 * n;
    std::size_t iters = 0;
    std::size_t stall = 0;
    std::size_t hi = n - 1;

    while (true) {
        // Deflate negligible subdiagonal entries in the leading block.
        for (std::size_t i = 1; i <= hi; ++i) {
            double small = eps * (std::abs(at(i - 1, i - 1)) + std::abs(at(i, i)));
            if (std::abs(at(i, i - 1)) <= small) at(i, i - 1) = Complex(0.0);
        }
        while (hi > 0 && at(hi, hi - 1) == Complex(0.0)) {
            vals.push_back(at(hi, hi));
            --hi;
            stall = 0;
        }
        if (hi == 0) {
            vals.push_back(at(0, 0));
            break;
        }
        std::size_t lo = hi;
        while (lo > 0 && at(lo, lo - 1) != Complex(0.0)) --lo;
        if (hi - lo == 1) {
            auto [g1, g2] = detail::eig2(at(lo, lo), at(lo, hi), at(hi, lo), at(hi, hi));
            vals.push_back(g1);
            vals.push_back(g2);
            if (lo == 0) break;
            hi = lo - 1;
            stall = 0;
            continue;
        }

        if (iters >= max_iter) {
            throw std::runtime_error("qr_eigs_small: no convergence after " +
                                     std::to_string(max_iter) + " iterations");
        }
        ++iters;
        ++stall;

        // Wilkinson shift from the trailing 2x2; exceptional shift when stuck.
        Complex mu;
        if (stall % 11 == 10) {
            mu = at(hi, hi) + 0.75 * std::abs(at(hi, hi - 1));
        } else {
            auto [g1, g2] =
                detail::eig2(at(hi - 1, hi - 1), at(hi - 1, hi), at(hi, hi - 1), at(hi, hi));
            mu = std::abs(g1 - at(hi, hi)) <= std::abs(g2 - at(hi, hi)) ? g1 : g2;
        }

        // Explicit shifted QR step on the active window via Givens rotations.
        for (std::size_t i = lo; i <= hi; ++i) at(i, i) -= mu;
        std::vector<Complex> cs(hi - lo), sn(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            Complex a = at(i, i), b = at(i + 1, i);
            double r = std::sqrt(std::norm(a) + std::norm(b));
            Complex c, s;
            if (r == 0.0) {
                c = 1.0;
                s = 0.0;
            } else {
                c = a / r;
                s = b / r;
            }
            cs[i - lo] = c;
            sn[i - lo] = s;
            for (std::size_t j = i; j <= hi; ++j) {
                Complex t1 = at(i, j), t2 = at(i + 1, j);
                at(i, j) = std::conj(c) * t1 + std::conj(s) * t2;
                at(i + 1, j) = -s * t1 + c * t2;
            }
        }
        for (std::size_t i = lo; i < hi; ++i) {
            Complex c = cs[i - lo], s = sn[i - lo];
            for (std::size_t r = lo; r <= hi; ++r) {
                Complex t1 = at(r, i), t2 = at(r, i + 1);
                at(r, i) = c * t1 + s * t2;
                at(r, i + 1) = -std::conj(s) * t1 + std::conj(c) * t2;
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) at(i, i) += mu;
    }

    std::sort(vals.begin(), vals.end(), canonical_less);
    return Spectrum(std::move(vals));
}

// ---------------------------------------------------------------------------
// Perron pair (power iteration)
// ---------------------------------------------------------------------------

/// Dominant eigenpair of a nonnegative square matrix by power iteration on
/// m + cI with c = 1 + max diagonal entry, started from the all-ones vector.
/// Fails when the iteration does not reach the residual tolerance, which
/// signals reducible or defective Perron structure; callers must then supply
/// the eigenpair explicitly.
inline EigenPair perron_pair(const DenseMatrix& m, double tol = 1e-10,
                             std::size_t max_iter = 5000) {
    detail::require(m.square(), "perron_pair: matrix not square (" +
                                    detail::shape_str(m.rows(), m.cols()) + ")");
    const std::size_t n = m.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            detail::require(m(i, j) >= 0.0, "perron_pair: negative entry at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
        }
        max_diag = std::max(max_diag, m(i, i));
    }
    const double c = 1.0 + max_diag;

    std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> mv(n);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < n; ++i) mv[i] = dot(m.row(i), v);
        double rayleigh = dot(mv, v);
        double resid = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = mv[i] - rayleigh * v[i];
            resid += d * d;
        }
        if (std::sqrt(resid) <= tol) {
            return EigenPair(rayleigh, std::move(v));
        }
        double nn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mv[i] += c * v[i];
            nn += mv[i] * mv[i];
        }
        nn = std::sqrt(nn);
        if (nn == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) v[i] = mv[i] / nn;
    }
    throw std::runtime_error(
        "perron_pair: power iteration did not converge within " + std::to_string(max_iter) +
        " iterations; supply the Perron eigenpair explicitly");
}

}  // namespace spectralforge::numkit
