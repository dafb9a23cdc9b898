#pragma once

// Spectral surgery on a known partial eigensystem: replace the r eigenvalues
// carried by eigenvector columns X with the eigenvalues of the small r x r
// matrix diag(lambda_1..lambda_r) + C*X, leaving the rest of the spectrum
// untouched. Valid for any square matrix, diagonalizable or not.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "spectralforge/numkit.hpp"

namespace spectralforge::rado {

using numkit::Complex;
using numkit::DenseMatrix;
using numkit::EigenPair;
using numkit::Spectrum;

struct RadoInput {
    DenseMatrix a;               // n x n
    Spectrum full_spectrum;      // length n; first r entries belong to pairs
    std::vector<EigenPair> pairs;  // r unit eigenpairs of a
    DenseMatrix c;               // r x n
};

struct RadoResult {
    DenseMatrix updated;   // a + X*c
    Spectrum predicted;    // eigs(small) then the retained entries
    DenseMatrix small;     // diag(lambda_1..lambda_r) + c*X
};

namespace detail {

// Columns of X are the pair vectors; n x r.
inline DenseMatrix stack_columns(const std::vector<EigenPair>& pairs, std::size_t n) {
    DenseMatrix x(n, pairs.size());
    for (std::size_t j = 0; j < pairs.size(); ++j) {
        numkit::detail::require(pairs[j].vector.size() == n,
                                "rado_update: eigenvector " + std::to_string(j) +
                                    " has length " + std::to_string(pairs[j].vector.size()) +
                                    ", expected " + std::to_string(n));
        for (std::size_t i = 0; i < n; ++i) x(i, j) = pairs[j].vector[i];
    }
    return x;
}

}  // namespace detail

inline RadoResult rado_update(const RadoInput& input) {
    const DenseMatrix& a = input.a;
    numkit::detail::require(a.square(), "rado_update: a not square");
    const std::size_t n = a.rows();
    const std::size_t r = input.pairs.size();
    numkit::detail::require(r >= 1, "rado_update: at least one eigenpair required");
    numkit::detail::require(r <= n, "rado_update: more eigenpairs than dimension (" +
                                        std::to_string(r) + " > " + std::to_string(n) + ")");
    numkit::detail::require(r <= 64, "rado_update: rank " + std::to_string(r) +
                                         " exceeds the 64 small-solver limit");
    numkit::detail::require(input.full_spectrum.size() == n,
                            "rado_update: full_spectrum length " +
                                std::to_string(input.full_spectrum.size()) +
                                " does not match dimension " + std::to_string(n));
    numkit::detail::require(input.c.rows() == r && input.c.cols() == n,
                            "rado_update: c has shape " +
                                numkit::detail::shape_str(input.c.rows(), input.c.cols()) +
                                ", expected " + numkit::detail::shape_str(r, n));

    const double gate = 1e-8 * (1.0 + a.max_norm());
    for (std::size_t j = 0; j < r; ++j) {
        double resid = numkit::eigenpair_residual(a, input.pairs[j]);
        numkit::detail::require(resid <= gate,
                                "rado_update: pair " + std::to_string(j) +
                                    " violates the eigenpair residual gate (" +
                                    std::to_string(resid) + " > " + std::to_string(gate) + ")");
        Complex claimed = input.full_spectrum.values[j];
        numkit::detail::require(std::abs(claimed - Complex(input.pairs[j].value, 0.0)) <= 1e-8,
                                "rado_update: full_spectrum entry " + std::to_string(j) +
                                    " does not carry pair " + std::to_string(j) +
                                    "'s eigenvalue");
    }

    DenseMatrix x = detail::stack_columns(input.pairs, n);

    // small = diag(lambda) + c*X
    DenseMatrix small = numkit::matmul(input.c, x);
    for (std::size_t j = 0; j < r; ++j) small(j, j) += input.pairs[j].value;

    DenseMatrix updated = a + numkit::matmul(x, input.c);

    Spectrum gammas = numkit::qr_eigs_small(small);
    std::vector<Complex> predicted = gammas.values;
    for (std::size_t i = r; i < n; ++i) predicted.push_back(input.full_spectrum.values[i]);

    return RadoResult{std::move(updated), Spectrum(std::move(predicted)), std::move(small)};
}

/// Symmetric specialization: c = y * X^T turns the update into a + X*y*X^T.
/// Requires a symmetric, y symmetric and the pair vectors orthonormal; the
/// small matrix then agrees with diag(lambda) + y up to the Gram residual.
inline RadoResult symmetric_rado(const DenseMatrix& a, const Spectrum& full_spectrum,
                                 const std::vector<EigenPair>& pairs, const DenseMatrix& y) {
    numkit::detail::require(a.square(), "symmetric_rado: a not square");
    numkit::detail::require(a.asymmetry() <= 1e-12, "symmetric_rado: a asymmetric beyond 1e-12");
    const std::size_t r = pairs.size();
    numkit::detail::require(r >= 1, "symmetric_rado: at least one eigenpair required");
    numkit::detail::require(y.rows() == r && y.cols() == r,
                            "symmetric_rado: y has shape " +
                                numkit::detail::shape_str(y.rows(), y.cols()) + ", expected " +
                                numkit::detail::shape_str(r, r));
    numkit::detail::require(y.asymmetry() <= 1e-12, "symmetric_rado: y asymmetric beyond 1e-12");
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = i; j < r; ++j) {
            double g = numkit::dot(pairs[i].vector, pairs[j].vector);
            double expected = (i == j) ? 1.0 : 0.0;
            numkit::detail::require(std::abs(g - expected) <= 1e-10,
                                    "symmetric_rado: pair vectors not orthonormal (Gram(" +
                                        std::to_string(i) + "," + std::to_string(j) + ") = " +
                                        std::to_string(g) + ")");
        }
    }

    DenseMatrix x = detail::stack_columns(pairs, a.rows());
    DenseMatrix c = numkit::matmul(y, x.transposed());
    return rado_update(RadoInput{a, full_spectrum, pairs, std::move(c)});
}

}  // namespace spectralforge::rado
