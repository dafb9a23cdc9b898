#pragma once

// Block assembly: given k blocks with one unit eigenpair each and a k x k
// coupling matrix rho, builds the big matrix whose diagonal blocks are
// A_j + rho_jj*u_j*u_j^T and whose (p,q) off-diagonal block is
// rho_pq*u_p*u_q^T. The spectrum of the result is the blocks' spectra with
// each lead eigenvalue replaced by the eigenvalues of the small k x k
// coupling matrix. No diagonalizability of the blocks is required.

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "spectralforge/numkit.hpp"

namespace spectralforge::blockforge {

using numkit::Complex;
using numkit::DenseMatrix;
using numkit::EigenPair;
using numkit::Spectrum;

struct BlockSystem {
    std::vector<DenseMatrix> blocks;   // sizes n_1..n_k
    std::vector<EigenPair> pairs;      // (lambda_1j, u_j), u_j of length n_j
    std::vector<Spectrum> spectra;     // full spectrum of each block
    DenseMatrix rho{1, 1};             // k x k coupling constants

    std::size_t k() const { return blocks.size(); }
};

struct AssembledSystem {
    DenseMatrix big;      // n x n, n = sum n_j
    DenseMatrix small;    // k x k: diag lambda_1j + rho_jj, off-diag rho_pq
    Spectrum predicted;   // retained block eigenvalues then eigs(small)
};

/// Index of the spectrum entry closest to the given eigenvalue; the entry
/// must lie within 1e-8 or the input is rejected. `label` names the spectrum
/// in the error message.
inline std::size_t lead_index(const Spectrum& spectrum, double value,
                              const std::string& label) {
    numkit::detail::require(spectrum.size() >= 1, label + " is empty");
    std::size_t best = 0;
    double best_d = std::abs(spectrum.values[0] - Complex(value, 0.0));
    for (std::size_t i = 1; i < spectrum.size(); ++i) {
        double d = std::abs(spectrum.values[i] - Complex(value, 0.0));
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    numkit::detail::require(best_d <= 1e-8, "no entry of " + label +
                                                " lies within 1e-8 of the pair eigenvalue " +
                                                std::to_string(value));
    return best;
}

/// The spectrum with the entry closest to `value` removed: the part of a
/// block's spectrum that survives assembly.
inline std::vector<Complex> retained(const Spectrum& spectrum, double value,
                                     const std::string& label) {
    std::size_t drop = lead_index(spectrum, value, label);
    std::vector<Complex> kept;
    kept.reserve(spectrum.size() - 1);
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (i != drop) kept.push_back(spectrum.values[i]);
    }
    return kept;
}

namespace detail {

inline void validate(const BlockSystem& sys) {
    const std::size_t k = sys.k();
    numkit::detail::require(k >= 1, "assemble: no blocks");
    numkit::detail::require(k <= 64, "assemble: k = " + std::to_string(k) +
                                         " exceeds the 64 small-solver limit");
    numkit::detail::require(sys.pairs.size() == k && sys.spectra.size() == k,
                            "assemble: blocks, pairs and spectra must have equal length");
    numkit::detail::require(sys.rho.rows() == k && sys.rho.cols() == k,
                            "assemble: rho has shape " +
                                numkit::detail::shape_str(sys.rho.rows(), sys.rho.cols()) +
                                ", expected " + numkit::detail::shape_str(k, k));
    for (std::size_t j = 0; j < k; ++j) {
        const DenseMatrix& a = sys.blocks[j];
        numkit::detail::require(a.square(),
                                "assemble: block " + std::to_string(j) + " not square");
        numkit::detail::require(sys.pairs[j].vector.size() == a.rows(),
                                "assemble: pair " + std::to_string(j) + " has length " +
                                    std::to_string(sys.pairs[j].vector.size()) +
                                    ", expected " + std::to_string(a.rows()));
        numkit::detail::require(sys.spectra[j].size() == a.rows(),
                                "assemble: spectra[" + std::to_string(j) + "] has length " +
                                    std::to_string(sys.spectra[j].size()) + ", expected " +
                                    std::to_string(a.rows()));
        double gate = 1e-8 * (1.0 + a.max_norm());
        double resid = numkit::eigenpair_residual(a, sys.pairs[j]);
        numkit::detail::require(resid <= gate,
                                "assemble: pair " + std::to_string(j) +
                                    " violates the eigenpair residual gate (" +
                                    std::to_string(resid) + " > " + std::to_string(gate) + ")");
        lead_index(sys.spectra[j], sys.pairs[j].value, "spectra[" + std::to_string(j) + "]");
    }
}

}  // namespace detail

inline AssembledSystem assemble(const BlockSystem& sys) {
    detail::validate(sys);
    const std::size_t k = sys.k();

    std::vector<std::size_t> offset(k + 1, 0);
    for (std::size_t j = 0; j < k; ++j) offset[j + 1] = offset[j] + sys.blocks[j].rows();
    const std::size_t n = offset[k];

    DenseMatrix big(n, n);
    for (std::size_t p = 0; p < k; ++p) {
        const auto& up = sys.pairs[p].vector;
        for (std::size_t q = 0; q < k; ++q) {
            const auto& uq = sys.pairs[q].vector;
            double r = sys.rho(p, q);
            for (std::size_t i = 0; i < up.size(); ++i) {
                for (std::size_t j = 0; j < uq.size(); ++j) {
                    double v = r * up[i] * uq[j];
                    if (p == q) v += sys.blocks[p](i, j);
                    big(offset[p] + i, offset[q] + j) = v;
                }
            }
        }
    }

    DenseMatrix small(k, k);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = 0; q < k; ++q)
            small(p, q) = (p == q) ? sys.pairs[p].value + sys.rho(p, p) : sys.rho(p, q);

    // Retained eigenvalues first, in block order, then the coupling values.
    std::vector<Complex> predicted;
    predicted.reserve(n);
    for (std::size_t j = 0; j < k; ++j) {
        auto kept = retained(sys.spectra[j], sys.pairs[j].value,
                             "spectra[" + std::to_string(j) + "]");
        predicted.insert(predicted.end(), kept.begin(), kept.end());
    }
    Spectrum gammas = numkit::qr_eigs_small(small);
    predicted.insert(predicted.end(), gammas.values.begin(), gammas.values.end());

    return AssembledSystem{std::move(big), std::move(small), Spectrum(std::move(predicted))};
}

/// Two-block case with scalar couplings; the classical one-eigenvalue-each
/// surgery. rho11 = rho22 = 0 leaves only the symmetric cross coupling.
inline AssembledSystem fiedler2(const DenseMatrix& a, const Spectrum& a_spec,
                                const EigenPair& u, const DenseMatrix& b,
                                const Spectrum& b_spec, const EigenPair& v, double rho,
                                double rho11 = 0.0, double rho22 = 0.0) {
    numkit::detail::require(a.square() && a.asymmetry() <= 1e-12,
                            "fiedler2: a not symmetric");
    numkit::detail::require(b.square() && b.asymmetry() <= 1e-12,
                            "fiedler2: b not symmetric");
    BlockSystem sys;
    sys.blocks = {a, b};
    sys.pairs = {u, v};
    sys.spectra = {a_spec, b_spec};
    sys.rho = DenseMatrix(2, 2, {rho11, rho, rho, rho22});
    return assemble(sys);
}

/// Tridiagonal-by-blocks restriction: zero diagonal couplings and coupling
/// only between consecutive blocks. The sparsity pattern is enforced.
inline AssembledSystem chain(const BlockSystem& sys) {
    const std::size_t k = sys.k();
    numkit::detail::require(sys.rho.rows() == k && sys.rho.cols() == k,
                            "chain: rho has shape " +
                                numkit::detail::shape_str(sys.rho.rows(), sys.rho.cols()) +
                                ", expected " + numkit::detail::shape_str(k, k));
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) {
            bool off_chain = (p == q) || (p > q ? p - q : q - p) > 1;
            if (off_chain) {
                numkit::detail::require(sys.rho(p, q) == 0.0,
                                        "chain: rho(" + std::to_string(p) + "," +
                                            std::to_string(q) +
                                            ") must be zero for the chain pattern");
            }
        }
    }
    return assemble(sys);
}

}  // namespace spectralforge::blockforge
