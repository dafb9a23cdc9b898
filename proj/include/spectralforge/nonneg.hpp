#pragma once

// Nonnegative specializations of the block assembly: entrywise certification
// and the circulant realization, which picks coupling constants so the small
// matrix is a nonnegative circulant and the new eigenvalues are the first-row
// polynomial evaluated at the k-th roots of unity.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "spectralforge/blockforge.hpp"
#include "spectralforge/numkit.hpp"

namespace spectralforge::nonneg {

using numkit::Complex;
using numkit::DenseMatrix;
using numkit::EigenPair;
using numkit::Spectrum;

struct NonnegReport {
    bool nonnegative = true;
    // First violation in row-major order; meaningful only when !nonnegative.
    std::size_t i = 0;
    std::size_t j = 0;
    double value = 0.0;
};

inline NonnegReport check_nonnegative(const DenseMatrix& m, double tol = 1e-12) {
    numkit::detail::require(tol >= 0.0, "check_nonnegative: negative tolerance");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j) < -tol) return NonnegReport{false, i, j, m(i, j)};
        }
    }
    return NonnegReport{};
}

/// The coupling layout that makes the small matrix a circulant: base_row is
/// its first row (lambda_11 + rho_11, rho_12, ..., rho_1k); rho_full is the
/// actual coupling matrix fed to assembly, whose diagonal absorbs the gap
/// rho_jj = base_row[0] - lambda_1j so every small-matrix diagonal entry
/// equals base_row[0]. poly_coeffs are base_row read as a polynomial.
struct CirculantPlan {
    std::vector<double> base_row;
    DenseMatrix rho_full;
    std::vector<double> poly_coeffs;
};

struct CirculantResult {
    blockforge::AssembledSystem system;
    CirculantPlan plan;
    // Paper-order grouping: p(w^l) followed by block l's retained values,
    // l = 0..k-1. Same multiset as system.predicted; perron_index = 0.
    Spectrum predicted;
};

namespace detail {

inline double perron_value(const Spectrum& s, std::size_t block) {
    numkit::detail::require(s.size() >= 1,
                            "circulant_realize: block_spectra[" + std::to_string(block) +
                                "] is empty");
    std::size_t idx = s.perron_index.value_or(0);
    Complex v = s.values[idx];
    numkit::detail::require(std::abs(v.imag()) <= 1e-12,
                            "circulant_realize: Perron root of block " + std::to_string(block) +
                                " is not real");
    return v.real();
}

}  // namespace detail

inline CirculantResult circulant_realize(const std::vector<Spectrum>& block_spectra,
                                         const std::vector<DenseMatrix>& blocks,
                                         const std::vector<double>& rho_first_row,
                                         std::vector<EigenPair> pairs = {}) {
    const std::size_t k = blocks.size();
    numkit::detail::require(k >= 1, "circulant_realize: no blocks");
    numkit::detail::require(block_spectra.size() == k,
                            "circulant_realize: block_spectra length " +
                                std::to_string(block_spectra.size()) + " does not match " +
                                std::to_string(k) + " blocks");
    numkit::detail::require(rho_first_row.size() == k,
                            "circulant_realize: rho_first_row length " +
                                std::to_string(rho_first_row.size()) + " does not match " +
                                std::to_string(k) + " blocks");
    for (std::size_t t = 0; t < k; ++t) {
        numkit::detail::require(std::isfinite(rho_first_row[t]) && rho_first_row[t] >= 0.0,
                                "circulant_realize: negative rho entry at position " +
                                    std::to_string(t));
    }

    std::vector<double> lead(k);
    for (std::size_t j = 0; j < k; ++j) lead[j] = detail::perron_value(block_spectra[j], j);
    for (std::size_t j = 1; j < k; ++j) {
        numkit::detail::require(
            lead[0] >= lead[j],
            "circulant_realize: blocks must be ordered with the largest Perron root first "
            "(block " + std::to_string(j) + " has root " + std::to_string(lead[j]) +
                " > " + std::to_string(lead[0]) + ")");
    }

    std::vector<double> base_row(k);
    base_row[0] = lead[0] + rho_first_row[0];
    for (std::size_t t = 1; t < k; ++t) base_row[t] = rho_first_row[t];

    DenseMatrix rho_full(k, k);
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) {
            if (p == q) {
                double gap = base_row[0] - lead[p];
                numkit::detail::require(gap >= 0.0,
                                        "circulant_realize: diagonal consistency unsatisfiable "
                                        "for block " + std::to_string(p));
                rho_full(p, q) = gap;
            } else {
                rho_full(p, q) = base_row[(q + k - p) % k];
            }
        }
    }

    if (pairs.empty()) {
        pairs.reserve(k);
        for (std::size_t j = 0; j < k; ++j) pairs.push_back(numkit::perron_pair(blocks[j]));
    }
    numkit::detail::require(pairs.size() == k, "circulant_realize: pairs length " +
                                                   std::to_string(pairs.size()) +
                                                   " does not match " + std::to_string(k) +
                                                   " blocks");
    for (std::size_t j = 0; j < k; ++j) {
        numkit::detail::require(std::abs(pairs[j].value - lead[j]) <= 1e-8,
                                "circulant_realize: block " + std::to_string(j) +
                                    "'s eigenpair value " + std::to_string(pairs[j].value) +
                                    " does not match the claimed Perron root " +
                                    std::to_string(lead[j]));
    }

    blockforge::BlockSystem sys{blocks, std::move(pairs), block_spectra, std::move(rho_full)};
    blockforge::AssembledSystem assembled = blockforge::assemble(sys);

    // p(w^l) at the k-th roots of unity; real axis points computed in real
    // arithmetic, upper-half values mirrored to exact conjugates.
    std::vector<Complex> circ_vals(k);
    for (std::size_t l = 0; l < k; ++l) {
        if (2 * l > k) {
            circ_vals[l] = std::conj(circ_vals[k - l]);
        } else if (l == 0 || 2 * l == k) {
            double sign0 = (l == 0) ? 1.0 : -1.0;
            double sum = 0.0, sgn = 1.0;
            for (std::size_t t = 0; t < k; ++t, sgn *= sign0) sum += base_row[t] * sgn;
            circ_vals[l] = Complex(sum, 0.0);
        } else {
            double angle = 2.0 * std::numbers::pi * static_cast<double>(l) /
                           static_cast<double>(k);
            Complex w = std::polar(1.0, angle);
            Complex acc = 0.0;
            for (std::size_t t = k; t-- > 0;) acc = acc * w + base_row[t];
            circ_vals[l] = acc;
        }
    }

    std::vector<Complex> grouped;
    grouped.reserve(assembled.predicted.size());
    for (std::size_t l = 0; l < k; ++l) {
        grouped.push_back(circ_vals[l]);
        auto kept = blockforge::retained(block_spectra[l], lead[l],
                                         "block_spectra[" + std::to_string(l) + "]");
        grouped.insert(grouped.end(), kept.begin(), kept.end());
    }
    Spectrum predicted(std::move(grouped), 0);

    CirculantPlan plan{base_row, sys.rho, base_row};
    return CirculantResult{std::move(assembled), std::move(plan), std::move(predicted)};
}

}  // namespace spectralforge::nonneg
