#pragma once

// Doubly stochastic joins: two doubly stochastic matrices are coupled through
// rank-one all-ones blocks into a larger doubly stochastic matrix whose full
// spectrum is known in closed form. Two variants: one scales the first block
// by alpha (alpha and rho must not both vanish), the other shifts both blocks
// affinely and never degenerates. Neither requires diagonalizability.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "spectralforge/numkit.hpp"

namespace spectralforge::dstoch {

using numkit::Complex;
using numkit::DenseMatrix;
using numkit::Spectrum;

struct DSReport {
    bool doubly_stochastic = true;
    double worst_sum_residual = 0.0;  // max |row or column sum - 1|
    double min_entry = 0.0;
};

inline DSReport is_doubly_stochastic(const DenseMatrix& m, double tol = 1e-10) {
    numkit::detail::require(tol >= 0.0, "is_doubly_stochastic: negative tolerance");
    DSReport report;
    if (!m.square()) {
        report.doubly_stochastic = false;
        return report;
    }
    const std::size_t n = m.rows();
    report.min_entry = m(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0, cs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            rs += m(i, j);
            cs += m(j, i);
            report.min_entry = std::min(report.min_entry, m(i, j));
        }
        report.worst_sum_residual =
            std::max({report.worst_sum_residual, std::abs(rs - 1.0), std::abs(cs - 1.0)});
    }
    report.doubly_stochastic =
        report.worst_sum_residual <= tol && report.min_entry >= -tol;
    return report;
}

enum class JoinMode { scaled, affine };

struct DSJoinSpec {
    DenseMatrix t1{1, 1};  // m x m doubly stochastic
    DenseMatrix t2{1, 1};  // n x n doubly stochastic, n >= m
    Spectrum spec1;    // (1, lambda_2..lambda_m)
    Spectrum spec2;    // (1, mu_2..mu_n)
    double alpha = 0.0;
    double rho = 0.0;
    JoinMode mode = JoinMode::scaled;
};

struct DSJoinResult {
    DenseMatrix d;       // (m+n) x (m+n) doubly stochastic
    Spectrum predicted;  // displayed order: 1, second value, scaled lambdas, scaled mus
};

namespace detail {

inline void validate(const DSJoinSpec& spec) {
    numkit::detail::require(spec.t1.square(), "ds join: t1 not square");
    numkit::detail::require(spec.t2.square(), "ds join: t2 not square");
    const std::size_t m = spec.t1.rows(), n = spec.t2.rows();
    numkit::detail::require(m <= n, "ds join: t1 is " + std::to_string(m) + "x" +
                                        std::to_string(m) + " but t2 is only " +
                                        std::to_string(n) + "x" + std::to_string(n) +
                                        "; order inputs so the smaller matrix comes first");
    numkit::detail::require(std::isfinite(spec.alpha) && spec.alpha >= 0.0,
                            "ds join: alpha must be a nonnegative real");
    numkit::detail::require(std::isfinite(spec.rho) && spec.rho >= 0.0,
                            "ds join: rho must be a nonnegative real");
    numkit::detail::require(spec.spec1.size() == m,
                            "ds join: spec1 length " + std::to_string(spec.spec1.size()) +
                                " does not match t1 dimension " + std::to_string(m));
    numkit::detail::require(spec.spec2.size() == n,
                            "ds join: spec2 length " + std::to_string(spec.spec2.size()) +
                                " does not match t2 dimension " + std::to_string(n));
    numkit::detail::require(std::abs(spec.spec1.values[0] - Complex(1.0, 0.0)) <= 1e-8,
                            "ds join: spec1 must lead with the eigenvalue 1");
    numkit::detail::require(std::abs(spec.spec2.values[0] - Complex(1.0, 0.0)) <= 1e-8,
                            "ds join: spec2 must lead with the eigenvalue 1");
    DSReport r1 = is_doubly_stochastic(spec.t1);
    numkit::detail::require(r1.doubly_stochastic,
                            "ds join: t1 is not doubly stochastic (worst sum residual " +
                                std::to_string(r1.worst_sum_residual) + ", min entry " +
                                std::to_string(r1.min_entry) + ")");
    DSReport r2 = is_doubly_stochastic(spec.t2);
    numkit::detail::require(r2.doubly_stochastic,
                            "ds join: t2 is not doubly stochastic (worst sum residual " +
                                std::to_string(r2.worst_sum_residual) + ", min entry " +
                                std::to_string(r2.min_entry) + ")");
}

/// D = pref * [[s1*T1 + a1*E_mm, rho*E_mn], [rho*E_nm, s2*T2 + a2*E_nn]]
/// where E_xy is the outer product of normalized all-ones vectors.
inline DenseMatrix build_join(const DSJoinSpec& spec, double pref, double s1, double a1,
                              double s2, double a2) {
    const std::size_t m = spec.t1.rows(), n = spec.t2.rows();
    const double em = 1.0 / std::sqrt(static_cast<double>(m));
    const double en = 1.0 / std::sqrt(static_cast<double>(n));
    DenseMatrix d(m + n, m + n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            d(i, j) = pref * (s1 * spec.t1(i, j) + a1 * em * em);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            d(i, m + j) = pref * spec.rho * em * en;
            d(m + j, i) = pref * spec.rho * en * em;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            d(m + i, m + j) = pref * (s2 * spec.t2(i, j) + a2 * en * en);
    return d;
}

}  // namespace detail

/// Scaled join: D = 1/(alpha + rho*n/sqrt(mn)) * [[alpha*T1, rho e_m e_n^T],
/// [rho e_n e_m^T, (alpha + rho(n-m)/sqrt(mn))*T2]].
inline DSJoinResult ds_join(const DSJoinSpec& spec) {
    numkit::detail::require(spec.mode == JoinMode::scaled,
                            "ds_join: spec.mode must be scaled");
    detail::validate(spec);
    numkit::detail::require(spec.alpha + spec.rho > 0.0,
                            "ds_join: alpha and rho must not vanish simultaneously");
    const double m = static_cast<double>(spec.t1.rows());
    const double n = static_cast<double>(spec.t2.rows());
    const double sq = std::sqrt(m * n);
    const double alpha = spec.alpha, rho = spec.rho;

    const double pref = 1.0 / (alpha + rho * n / sq);
    const double s2 = alpha + rho * (n - m) / sq;
    DenseMatrix d = detail::build_join(spec, pref, alpha, 0.0, s2, 0.0);

    std::vector<Complex> predicted;
    predicted.reserve(spec.t1.rows() + spec.t2.rows());
    predicted.emplace_back(1.0, 0.0);
    predicted.emplace_back((alpha * sq - rho * m) / (alpha * sq + rho * n), 0.0);
    const double f_lambda = alpha / (alpha + rho * n / sq);
    for (std::size_t i = 1; i < spec.spec1.size(); ++i)
        predicted.push_back(f_lambda * spec.spec1.values[i]);
    const double f_mu = (alpha * sq + rho * (n - m)) / (alpha * sq + rho * n);
    for (std::size_t i = 1; i < spec.spec2.size(); ++i)
        predicted.push_back(f_mu * spec.spec2.values[i]);

    return DSJoinResult{std::move(d), Spectrum(std::move(predicted), 0)};
}

/// Affine join: D = 1/(1 + alpha + rho*n/sqrt(mn)) * [[T1 + alpha e_m e_m^T,
/// rho e_m e_n^T], [rho e_n e_m^T, T2 + (alpha + rho(n-m)/sqrt(mn)) e_n e_n^T]].
/// The prefactor never degenerates, so alpha = rho = 0 is allowed.
inline DSJoinResult ds_join_affine(const DSJoinSpec& spec) {
    numkit::detail::require(spec.mode == JoinMode::affine,
                            "ds_join_affine: spec.mode must be affine");
    detail::validate(spec);
    const double m = static_cast<double>(spec.t1.rows());
    const double n = static_cast<double>(spec.t2.rows());
    const double sq = std::sqrt(m * n);
    const double alpha = spec.alpha, rho = spec.rho;

    const double pref = 1.0 / (1.0 + alpha + rho * n / sq);
    const double a2 = alpha + rho * (n - m) / sq;
    DenseMatrix d = detail::build_join(spec, pref, 1.0, alpha, 1.0, a2);

    std::vector<Complex> predicted;
    predicted.reserve(spec.t1.rows() + spec.t2.rows());
    predicted.emplace_back(1.0, 0.0);
    predicted.emplace_back(((1.0 + alpha) * sq - rho * m) / ((1.0 + alpha) * sq + rho * n),
                           0.0);
    for (std::size_t i = 1; i < spec.spec1.size(); ++i)
        predicted.push_back(pref * spec.spec1.values[i]);
    for (std::size_t i = 1; i < spec.spec2.size(); ++i)
        predicted.push_back(pref * spec.spec2.values[i]);

    return DSJoinResult{std::move(d), Spectrum(std::move(predicted), 0)};
}

}  // namespace spectralforge::dstoch
