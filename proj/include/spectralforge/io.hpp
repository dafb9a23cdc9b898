#pragma once

// Serialization boundary: JSON input parsing (block systems, matrices,
// spectra) with field-path diagnostics, and JSON / CSV / Matrix Market
// output. Symmetric matrices get missing spectra and eigenpairs filled by
// the Jacobi oracle; nonsymmetric inputs must supply them explicitly.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spectralforge/blockforge.hpp"
#include "spectralforge/numkit.hpp"
#include "spectralforge/verify.hpp"

namespace spectralforge::io {

using json = nlohmann::ordered_json;
using numkit::Complex;
using numkit::DenseMatrix;
using numkit::EigenPair;
using numkit::Spectrum;

namespace detail {

inline double number_at(const json& j, const std::string& path) {
    numkit::detail::require(j.is_number(), path + " must be a number");
    return j.get<double>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

inline DenseMatrix parse_matrix(const json& j, const std::string& path) {
    numkit::detail::require(j.is_array() && !j.empty(),
                            path + " must be a non-empty array of rows");
    const std::size_t rows = j.size();
    numkit::detail::require(j[0].is_array() && !j[0].empty(),
                            path + "[0] must be a non-empty array");
    const std::size_t cols = j[0].size();
    std::vector<double> entries;
    entries.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = j[i];
        std::string rp = path + "[" + std::to_string(i) + "]";
        numkit::detail::require(row.is_array(), rp + " must be an array");
        numkit::detail::require(row.size() == cols,
                                rp + " has " + std::to_string(row.size()) +
                                    " entries, expected " + std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            entries.push_back(
                detail::number_at(row[c], rp + "[" + std::to_string(c) + "]"));
        }
    }
    return DenseMatrix(rows, cols, std::move(entries));
}

/// Spectra are arrays of [re, im] pairs.
inline Spectrum parse_spectrum(const json& j, const std::string& path) {
    numkit::detail::require(j.is_array() && !j.empty(),
                            path + " must be a non-empty array of [re, im] pairs");
    std::vector<Complex> values;
    values.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& entry = j[i];
        std::string ep = path + "[" + std::to_string(i) + "]";
        numkit::detail::require(entry.is_array() && entry.size() == 2,
                                ep + " must be a [re, im] pair");
        values.emplace_back(detail::number_at(entry[0], ep + "[0]"),
                            detail::number_at(entry[1], ep + "[1]"));
    }
    return Spectrum(std::move(values));
}

inline std::vector<double> parse_real_vector(const json& j, const std::string& path) {
    numkit::detail::require(j.is_array() && !j.empty(),
                            path + " must be a non-empty array of reals");
    std::vector<double> v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        v.push_back(detail::number_at(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return v;
}

/// Block-system input: {"blocks": [{"matrix": [[..]], "spectrum"?: [[re,im]..],
/// "eigenvalue"?: re, "eigenvector"?: [..]}, ...], "rho": [[..]]}.
/// Missing spectrum or eigenpair is filled by jacobi_eigs when the block is
/// symmetric (top eigenpair); otherwise the job is rejected naming the field.
inline blockforge::BlockSystem parse_block_system(const json& j, bool require_rho = true) {
    numkit::detail::require(j.is_object(), "input must be a JSON object");
    numkit::detail::require(j.contains("blocks"), "missing field \"blocks\"");
    const json& blocks = j["blocks"];
    numkit::detail::require(blocks.is_array() && !blocks.empty(),
                            "\"blocks\" must be a non-empty array");

    blockforge::BlockSystem sys;
    const std::size_t k = blocks.size();
    for (std::size_t b = 0; b < k; ++b) {
        std::string bp = "blocks[" + std::to_string(b) + "]";
        const json& blk = blocks[b];
        numkit::detail::require(blk.is_object(), bp + " must be an object");
        numkit::detail::require(blk.contains("matrix"), "missing field " + bp + ".matrix");
        DenseMatrix m = parse_matrix(blk["matrix"], bp + ".matrix");
        numkit::detail::require(m.square(), bp + ".matrix must be square");

        bool symmetric = m.is_symmetric(1e-12);
        bool have_pair = blk.contains("eigenvalue") && blk.contains("eigenvector");
        numkit::detail::require(blk.contains("eigenvalue") == blk.contains("eigenvector"),
                                bp + " must supply eigenvalue and eigenvector together");
        bool have_spectrum = blk.contains("spectrum");
        numkit::detail::require(
            symmetric || have_spectrum,
            bp + ".matrix is not symmetric, so the field " + bp + ".spectrum is required");
        numkit::detail::require(symmetric || have_pair,
                                bp + ".matrix is not symmetric, so the fields " + bp +
                                    ".eigenvalue and " + bp + ".eigenvector are required");

        Spectrum spectrum;
        EigenPair pair;
        if (have_spectrum && have_pair) {
            spectrum = parse_spectrum(blk["spectrum"], bp + ".spectrum");
            pair = EigenPair(detail::number_at(blk["eigenvalue"], bp + ".eigenvalue"),
                             parse_real_vector(blk["eigenvector"], bp + ".eigenvector"));
        } else {
            numkit::SymmetricEigen eig = numkit::jacobi_eigs(m);
            if (have_spectrum) {
                spectrum = parse_spectrum(blk["spectrum"], bp + ".spectrum");
            } else {
                spectrum = eig.spectrum;
            }
            if (have_pair) {
                pair = EigenPair(detail::number_at(blk["eigenvalue"], bp + ".eigenvalue"),
                                 parse_real_vector(blk["eigenvector"], bp + ".eigenvector"));
            } else {
                std::vector<double> top(m.rows());
                for (std::size_t i = 0; i < m.rows(); ++i) top[i] = eig.vectors(i, 0);
                pair = EigenPair(eig.spectrum.values[0].real(), std::move(top));
            }
        }
        sys.blocks.push_back(std::move(m));
        sys.spectra.push_back(std::move(spectrum));
        sys.pairs.push_back(std::move(pair));
    }

    if (require_rho) {
        numkit::detail::require(j.contains("rho"), "missing field \"rho\"");
        sys.rho = parse_matrix(j["rho"], "rho");
        numkit::detail::require(sys.rho.rows() == k && sys.rho.cols() == k,
                                "rho has shape " +
                                    numkit::detail::shape_str(sys.rho.rows(), sys.rho.cols()) +
                                    ", expected " + numkit::detail::shape_str(k, k));
    } else {
        sys.rho = DenseMatrix(k, k);
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline json matrix_to_json(const DenseMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json spectrum_to_json(const Spectrum& s) {
    json vals = json::array();
    for (Complex z : s.values) vals.push_back(json::array({z.real(), z.imag()}));
    return vals;
}

inline json audit_to_json(const verify::AuditReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks) {
        checks.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    return json{{"subject", report.subject},
                {"passed", report.passed},
                {"checks", std::move(checks)}};
}

namespace detail {

inline std::string real17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

/// CSV spectrum: header "re,im", one eigenvalue per row, canonical order.
inline void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "re,im\n";
    for (Complex z : s.canonical_sorted()) {
        out << detail::real17(z.real()) << "," << detail::real17(z.imag()) << "\n";
    }
}

/// Matrix Market coordinate format, 17 significant digits, row-major entry
/// order, 1-based indices.
inline void write_matrix_mtx(std::ostream& out, const DenseMatrix& m) {
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) ++nnz;
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << nnz << "\n";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) {
                out << (i + 1) << " " << (j + 1) << " " << detail::real17(m(i, j)) << "\n";
            }
        }
    }
}

}  // namespace spectralforge::io
