#pragma once

// Verification layer: multiset spectrum matching, determinant-residual
// certification for nonsymmetric predictions, and the audit pipeline that
// the command-line tool and the test suites share.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spectralforge/numkit.hpp"

namespace spectralforge::verify {

using numkit::Complex;
using numkit::DenseMatrix;
using numkit::Spectrum;

/// Outcome of spectrum verification. Matching fills `pairing` with
/// (predicted_index, oracle_index) in original index space; determinant
/// certification fills `residuals` and `bound` instead.
struct MatchReport {
    bool matched = false;
    double max_pair_distance = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> pairing;
    std::vector<double> residuals;
    double bound = 0.0;
};

/// Greedy nearest-neighbour matching after canonical sorting of both sides.
/// Ties are broken toward the earlier canonical position, which makes the
/// result deterministic.
inline MatchReport match_spectra(const Spectrum& predicted, const Spectrum& oracle,
                                 double tol) {
    numkit::detail::require(predicted.size() == oracle.size(),
                            "match_spectra: length mismatch (" +
                                std::to_string(predicted.size()) + " vs " +
                                std::to_string(oracle.size()) + ")");
    numkit::detail::require(tol >= 0.0, "match_spectra: negative tolerance");
    const std::size_t n = predicted.size();

    auto indexed_sorted = [](const Spectrum& s) {
        std::vector<std::pair<Complex, std::size_t>> v;
        v.reserve(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) v.emplace_back(s.values[i], i);
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return numkit::canonical_less(a.first, b.first);
        });
        return v;
    };
    auto ps = indexed_sorted(predicted);
    auto os = indexed_sorted(oracle);

    MatchReport report;
    std::vector<bool> used(n, false);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = n;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (used[j]) continue;
            double d = std::abs(ps[i].first - os[j].first);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        used[best] = true;
        worst = std::max(worst, best_d);
        report.pairing.emplace_back(ps[i].second, os[best].second);
    }
    std::sort(report.pairing.begin(), report.pairing.end());
    report.max_pair_distance = worst;
    report.matched = worst <= tol;
    return report;
}

/// Certification of predicted eigenvalues against a matrix without computing
/// its spectrum: each gamma must satisfy
///   |det(m - gamma*I)| <= tol_scale * (1 + max_norm(m))^dim.
/// Capped at dim 128; beyond that the bound is meaningless in doubles.
/// `matched` means all residuals within the bound; `max_pair_distance` holds
/// the worst residual.
inline MatchReport certify_eigenvalues(const DenseMatrix& m, const Spectrum& candidates,
                                       double tol_scale = 1e-6) {
    numkit::detail::require(m.square(), "certify_eigenvalues: matrix not square");
    numkit::detail::require(m.rows() <= 128,
                            "certify_eigenvalues: dimension " + std::to_string(m.rows()) +
                                " exceeds the 128 limit");
    numkit::detail::require(candidates.size() == m.rows(),
                            "certify_eigenvalues: spectrum length " +
                                std::to_string(candidates.size()) + " does not match dimension " +
                                std::to_string(m.rows()));
    numkit::detail::require(tol_scale >= 0.0, "certify_eigenvalues: negative tolerance scale");
    MatchReport report;
    report.bound = tol_scale * std::pow(1.0 + m.max_norm(), static_cast<double>(m.rows()));
    for (Complex g : candidates.values) {
        double r = std::abs(numkit::lu_det_complex(m, g));
        report.residuals.push_back(r);
        report.max_pair_distance = std::max(report.max_pair_distance, r);
    }
    report.matched = report.max_pair_distance <= report.bound;
    return report;
}

// ---------------------------------------------------------------------------
// Audit pipeline
// ---------------------------------------------------------------------------

struct AuditOptions {
    bool check_spectrum = true;
    bool expect_symmetric = false;
    bool expect_nonnegative = false;
    bool expect_doubly_stochastic = false;
    bool expect_zero_one = false;
    std::optional<double> expected_energy;
    std::optional<double> expected_perron;
    double tol = 1e-8;
    double det_tol_scale = 1e-6;
    double ds_tol = 1e-10;
    double nonneg_tol = 1e-12;
};

struct AuditCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AuditReport {
    std::string subject;
    bool passed = false;
    std::vector<AuditCheck> checks;

    void add(std::string name, bool ok, std::string detail) {
        checks.push_back(AuditCheck{std::move(name), ok, std::move(detail)});
    }

    void finalize() {
        passed = std::all_of(checks.begin(), checks.end(),
                             [](const AuditCheck& c) { return c.passed; });
    }

    std::string to_text() const {
        std::ostringstream out;
        out << "audit " << subject << ": " << (passed ? "pass" : "FAIL") << "\n";
        for (const auto& c : checks) {
            out << "  " << c.name << ": " << (c.passed ? "pass" : "FAIL");
            if (!c.detail.empty()) out << " (" << c.detail << ")";
            out << "\n";
        }
        return out.str();
    }
};

namespace detail {

inline std::string fmt(double x) {
    std::ostringstream out;
    out.precision(6);
    out << x;
    return out.str();
}

}  // namespace detail

/// Runs every check implied by the options against the realized matrix and
/// its predicted spectrum. Symmetric matrices are checked against the
/// symmetric eigensolver; nonsymmetric ones via determinant certification.
inline AuditReport audit(const std::string& subject, const DenseMatrix& matrix,
                         const Spectrum& predicted, const AuditOptions& opt = {}) {
    numkit::detail::require(matrix.square(), "audit: matrix not square");
    numkit::detail::require(predicted.size() == matrix.rows(),
                            "audit: spectrum length " + std::to_string(predicted.size()) +
                                " does not match dimension " + std::to_string(matrix.rows()));
    AuditReport report;
    report.subject = subject;
    const std::size_t n = matrix.rows();

    if (opt.expect_symmetric) {
        double asym = matrix.asymmetry();
        report.add("symmetric", asym <= 1e-12, "asymmetry " + detail::fmt(asym));
    }
    if (opt.check_spectrum) {
        if (matrix.is_symmetric(1e-12)) {
            auto oracle = numkit::jacobi_eigs(matrix);
            auto mr = match_spectra(predicted, oracle.spectrum, opt.tol);
            report.add("spectrum-match", mr.matched,
                       "max pair distance " + detail::fmt(mr.max_pair_distance) +
                           ", tol " + detail::fmt(opt.tol));
        } else {
            auto cr = certify_eigenvalues(matrix, predicted, opt.det_tol_scale);
            report.add("spectrum-certified", cr.matched,
                       "worst residual " + detail::fmt(cr.max_pair_distance) + ", bound " +
                           detail::fmt(cr.bound));
        }
    }
    // The trace identity is cheap, so it runs whether or not the full
    // spectrum check was requested.
    {
        double tr = matrix.trace();
        Complex sum = predicted.sum();
        double terr = std::abs(sum - Complex(tr, 0.0));
        double tbound = opt.tol * (1.0 + std::abs(tr));
        report.add("trace-identity", terr <= tbound,
                   "error " + detail::fmt(terr) + ", bound " + detail::fmt(tbound));
    }

    if (opt.expect_nonnegative) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) worst = std::min(worst, matrix(i, j));
        report.add("nonnegative", worst >= -opt.nonneg_tol,
                   "min entry " + detail::fmt(worst));
    }
    if (opt.expect_doubly_stochastic) {
        double worst_sum = 0.0;
        double min_entry = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double rs = 0.0, cs = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                rs += matrix(i, j);
                cs += matrix(j, i);
                min_entry = std::min(min_entry, matrix(i, j));
            }
            worst_sum = std::max({worst_sum, std::abs(rs - 1.0), std::abs(cs - 1.0)});
        }
        report.add("doubly-stochastic", worst_sum <= opt.ds_tol && min_entry >= -opt.ds_tol,
                   "worst sum residual " + detail::fmt(worst_sum) + ", min entry " +
                       detail::fmt(min_entry));
    }
    if (opt.expect_zero_one) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j < n && ok; ++j) {
                double x = matrix(i, j);
                if (x != 0.0 && x != 1.0) ok = false;
                if (i == j && x != 0.0) ok = false;
                if (matrix(i, j) != matrix(j, i)) ok = false;
            }
        }
        report.add("zero-one-adjacency", ok, ok ? "" : "entry outside {0,1} or loop/asymmetry");
    }
    if (opt.expected_energy) {
        double e = 0.0;
        for (Complex z : predicted.values) e += std::abs(z);
        double err = std::abs(e - *opt.expected_energy);
        double bound = opt.tol * static_cast<double>(n);
        report.add("energy", err <= bound,
                   "energy " + detail::fmt(e) + ", expected " + detail::fmt(*opt.expected_energy) +
                       ", error " + detail::fmt(err));
    }
    if (opt.expected_perron) {
        numkit::detail::require(predicted.perron_index.has_value(),
                                "audit: expected_perron set but spectrum has no perron_index");
        Complex p = predicted.values[*predicted.perron_index];
        double err = std::abs(p - Complex(*opt.expected_perron, 0.0));
        report.add("perron-root", err <= opt.tol * (1.0 + std::abs(*opt.expected_perron)),
                   "root " + detail::fmt(p.real()) + ", expected " +
                       detail::fmt(*opt.expected_perron));
    }

    report.finalize();
    return report;
}

}  // namespace spectralforge::verify
