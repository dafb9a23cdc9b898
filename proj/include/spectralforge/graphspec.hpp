#pragma once

// Graph constructions built on the block assembly: full joins of regular
// graphs, complete multipartite graphs, joins of isomorphic copies, and
// chain joins, each with its predicted spectrum and energy. Coupling
// constants sqrt(n_i*n_j) against normalized all-ones eigenvectors make the
// assembled matrix exactly the join's adjacency matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "spectralforge/blockforge.hpp"
#include "spectralforge/numkit.hpp"

namespace spectralforge::graphspec {

using numkit::Complex;
using numkit::DenseMatrix;
using numkit::EigenPair;
using numkit::Spectrum;

/// Simple graph: symmetric 0/1 adjacency with zero diagonal, validated.
class Graph {
  public:
    explicit Graph(DenseMatrix adjacency) : adjacency_(std::move(adjacency)) {
        numkit::detail::require(adjacency_.square(), "Graph: adjacency not square");
        for (std::size_t i = 0; i < adjacency_.rows(); ++i) {
            for (std::size_t j = 0; j < adjacency_.cols(); ++j) {
                double x = adjacency_(i, j);
                numkit::detail::require(x == 0.0 || x == 1.0,
                                        "Graph: adjacency entry (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") = " + std::to_string(x) +
                                            " is not 0 or 1");
                numkit::detail::require(x == adjacency_(j, i),
                                        "Graph: adjacency not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
            numkit::detail::require(adjacency_(i, i) == 0.0,
                                    "Graph: loop at vertex " + std::to_string(i));
        }
    }

    std::size_t size() const { return adjacency_.rows(); }
    const DenseMatrix& adjacency() const { return adjacency_; }

  private:
    DenseMatrix adjacency_;
};

/// Graph whose every vertex has the same degree, validated on construction.
class RegularGraph {
  public:
    RegularGraph(Graph graph, std::size_t degree)
        : graph_(std::move(graph)), degree_(degree) {
        for (std::size_t i = 0; i < graph_.size(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < graph_.size(); ++j) sum += graph_.adjacency()(i, j);
            numkit::detail::require(sum == static_cast<double>(degree),
                                    "RegularGraph: vertex " + std::to_string(i) +
                                        " has degree " + std::to_string(sum) + ", expected " +
                                        std::to_string(degree));
        }
    }

    const Graph& graph() const { return graph_; }
    std::size_t size() const { return graph_.size(); }
    std::size_t degree() const { return degree_; }
    const DenseMatrix& adjacency() const { return graph_.adjacency(); }

  private:
    Graph graph_;
    std::size_t degree_;
};

struct JoinResult {
    Graph joined;
    Spectrum predicted;
    double energy = 0.0;
    DenseMatrix small;  // the k x k coupling matrix behind the prediction
};

inline double energy(const Spectrum& s) {
    double e = 0.0;
    for (Complex z : s.values) e += std::abs(z);
    return e;
}

// ---------------------------------------------------------------------------
// Factories and ingestion
// ---------------------------------------------------------------------------

inline RegularGraph empty_graph(std::size_t n) {
    numkit::detail::require(n >= 1, "empty_graph: need at least one vertex");
    return RegularGraph(Graph(DenseMatrix(n, n)), 0);
}

inline RegularGraph complete_graph(std::size_t n) {
    numkit::detail::require(n >= 1, "complete_graph: need at least one vertex");
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j) ? 0.0 : 1.0;
    return RegularGraph(Graph(std::move(a)), n - 1);
}

inline RegularGraph cycle_graph(std::size_t n) {
    numkit::detail::require(n >= 3, "cycle_graph: need at least three vertices");
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, (i + 1) % n) = 1.0;
        a((i + 1) % n, i) = 1.0;
    }
    return RegularGraph(Graph(std::move(a)), 2);
}

/// Edge-list text format: first line "n m", then m lines "u v" with 0-based
/// vertex indices. Loops and duplicate edges are rejected with the offending
/// line number.
inline Graph read_edge_list(std::istream& in) {
    auto fail = [](std::size_t line, const std::string& msg) {
        throw std::invalid_argument("edge list line " + std::to_string(line) + ": " + msg);
    };
    std::string line;
    std::size_t lineno = 0;

    auto next_content_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };

    if (!next_content_line()) fail(1, "missing header \"n m\"");
    long long n = 0, m = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> n >> m) || (hs >> extra)) fail(lineno, "expected header \"n m\"");
        if (n < 1) fail(lineno, "vertex count must be at least 1");
        if (m < 0) fail(lineno, "edge count must be nonnegative");
    }

    DenseMatrix adjacency(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    std::set<std::pair<long long, long long>> seen;
    for (long long e = 0; e < m; ++e) {
        if (!next_content_line()) {
            fail(lineno + 1, "expected " + std::to_string(m) + " edges, found " +
                                 std::to_string(e));
        }
        std::istringstream es(line);
        long long u = 0, v = 0;
        std::string extra;
        if (!(es >> u >> v) || (es >> extra)) fail(lineno, "expected edge \"u v\"");
        if (u < 0 || u >= n || v < 0 || v >= n) {
            fail(lineno, "vertex index out of range [0, " + std::to_string(n) + ")");
        }
        if (u == v) fail(lineno, "loop at vertex " + std::to_string(u));
        std::pair<long long, long long> key = std::minmax(u, v);
        if (!seen.insert(key).second) {
            fail(lineno, "duplicate edge " + std::to_string(u) + " " + std::to_string(v));
        }
        adjacency(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) = 1.0;
        adjacency(static_cast<std::size_t>(v), static_cast<std::size_t>(u)) = 1.0;
    }
    if (next_content_line()) fail(lineno, "trailing content after the last edge");
    return Graph(std::move(adjacency));
}

/// Adjacency conjugated by a seeded-random permutation matrix; the result is
/// isomorphic to the input. Fisher-Yates with the raw engine keeps the
/// permutation reproducible across standard libraries.
inline Graph permuted_copy(const Graph& g, std::uint64_t seed) {
    const std::size_t n = g.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i-- > 1;) {
        std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(perm[i], perm[j]);
    }
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(perm[i], perm[j]) = g.adjacency()(i, j);
    return Graph(std::move(a));
}

inline std::vector<double> path_eigenvalues(std::size_t k) {
    numkit::detail::require(k >= 1, "path_eigenvalues: need at least one vertex");
    std::vector<double> vals(k);
    for (std::size_t j = 1; j <= k; ++j) {
        vals[j - 1] = 2.0 * std::cos(static_cast<double>(j) * std::numbers::pi /
                                     static_cast<double>(k + 1));
    }
    return vals;
}

// ---------------------------------------------------------------------------
// Joins
// ---------------------------------------------------------------------------

namespace detail {

/// Exact 0/1 adjacency of the join: parts on the diagonal, all-ones cross
/// blocks between part pairs selected by `linked`.
template <typename Linked>
inline Graph join_adjacency(const std::vector<RegularGraph>& parts, Linked linked) {
    std::vector<std::size_t> offset(parts.size() + 1, 0);
    for (std::size_t j = 0; j < parts.size(); ++j) offset[j + 1] = offset[j] + parts[j].size();
    DenseMatrix a(offset.back(), offset.back());
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (std::size_t i = 0; i < parts[p].size(); ++i)
            for (std::size_t j = 0; j < parts[p].size(); ++j)
                a(offset[p] + i, offset[p] + j) = parts[p].adjacency()(i, j);
        for (std::size_t q = p + 1; q < parts.size(); ++q) {
            if (!linked(p, q)) continue;
            for (std::size_t i = 0; i < parts[p].size(); ++i)
                for (std::size_t j = 0; j < parts[q].size(); ++j) {
                    a(offset[p] + i, offset[q] + j) = 1.0;
                    a(offset[q] + j, offset[p] + i) = 1.0;
                }
        }
    }
    return Graph(std::move(a));
}

/// Block system shared by the join operations: each part contributes its
/// adjacency, the Perron pair (d, normalized all-ones) and its Jacobi
/// spectrum; couplings are sqrt(n_p * n_q) where parts are linked.
template <typename Linked>
inline blockforge::BlockSystem join_system(const std::vector<RegularGraph>& parts,
                                           Linked linked) {
    blockforge::BlockSystem sys;
    const std::size_t k = parts.size();
    sys.rho = DenseMatrix(k, k);
    for (std::size_t p = 0; p < k; ++p) {
        sys.blocks.push_back(parts[p].adjacency());
        sys.pairs.emplace_back(static_cast<double>(parts[p].degree()),
                               std::vector<double>(parts[p].size(), 1.0));
        sys.spectra.push_back(numkit::jacobi_eigs(parts[p].adjacency()).spectrum);
        for (std::size_t q = 0; q < k; ++q) {
            if (p != q && linked(std::min(p, q), std::max(p, q))) {
                sys.rho(p, q) = std::sqrt(static_cast<double>(parts[p].size()) *
                                          static_cast<double>(parts[q].size()));
            }
        }
    }
    return sys;
}

}  // namespace detail

/// Join of k regular graphs: every vertex of each part connected to every
/// vertex of every other part.
inline JoinResult join_all(const std::vector<RegularGraph>& parts) {
    numkit::detail::require(!parts.empty(), "join_all: no parts");
    auto all = [](std::size_t, std::size_t) { return true; };
    blockforge::BlockSystem sys = detail::join_system(parts, all);
    blockforge::AssembledSystem assembled = blockforge::assemble(sys);
    Spectrum predicted = std::move(assembled.predicted);
    predicted.set_perron_at_max();
    double e = energy(predicted);
    return JoinResult{detail::join_adjacency(parts, all), std::move(predicted), e,
                      std::move(assembled.small)};
}

/// Complete multipartite graph: the join of edgeless parts.
inline JoinResult complete_multipartite(const std::vector<std::size_t>& sizes) {
    numkit::detail::require(!sizes.empty(), "complete_multipartite: no part sizes");
    std::vector<RegularGraph> parts;
    parts.reserve(sizes.size());
    for (std::size_t s : sizes) parts.push_back(empty_graph(s));
    return join_all(parts);
}

/// Join of k isomorphic copies of one regular graph, by the closed form:
/// d + n(k-1) once, the non-lead eigenvalues k times, d - n with
/// multiplicity k - 1. The joined graph uses identity copies.
inline JoinResult join_isomorphic_copies(const RegularGraph& g, const Spectrum& spectrum,
                                         std::size_t k) {
    const std::size_t n = g.size();
    const double d = static_cast<double>(g.degree());
    numkit::detail::require(k >= 1, "join_isomorphic_copies: need at least one copy");
    numkit::detail::require(spectrum.size() == n,
                            "join_isomorphic_copies: spectrum length " +
                                std::to_string(spectrum.size()) +
                                " does not match vertex count " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        numkit::detail::require(std::abs(spectrum.values[i].imag()) <= 1e-12,
                                "join_isomorphic_copies: spectrum entry " + std::to_string(i) +
                                    " is not real");
        if (i + 1 < n) {
            numkit::detail::require(
                spectrum.values[i].real() >= spectrum.values[i + 1].real() - 1e-8,
                "join_isomorphic_copies: spectrum not sorted descending at entry " +
                    std::to_string(i + 1));
        }
    }
    numkit::detail::require(std::abs(spectrum.values[0].real() - d) <= 1e-8,
                            "join_isomorphic_copies: spectrum lead " +
                                std::to_string(spectrum.values[0].real()) +
                                " does not match the degree " + std::to_string(g.degree()));

    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    std::vector<Complex> predicted;
    predicted.reserve(n * k);
    predicted.emplace_back(d + nn * (kk - 1.0), 0.0);
    for (std::size_t i = 1; i < n; ++i) predicted.push_back(spectrum.values[i]);
    for (std::size_t copy = 1; copy < k; ++copy) {
        predicted.emplace_back(d - nn, 0.0);
        for (std::size_t i = 1; i < n; ++i) predicted.push_back(spectrum.values[i]);
    }

    DenseMatrix small(k, k);
    for (std::size_t p = 0; p < k; ++p)
        for (std::size_t q = 0; q < k; ++q) small(p, q) = (p == q) ? d : nn;

    std::vector<RegularGraph> parts(k, g);
    auto all = [](std::size_t, std::size_t) { return true; };
    Spectrum ps(std::move(predicted), 0);
    double e = energy(ps);
    return JoinResult{detail::join_adjacency(parts, all), std::move(ps), e, std::move(small)};
}

/// Chain join: consecutive parts fully connected, nothing else. For k = 2
/// this coincides with join_all.
inline JoinResult chain_join(const std::vector<RegularGraph>& parts) {
    numkit::detail::require(!parts.empty(), "chain_join: no parts");
    auto consecutive = [](std::size_t p, std::size_t q) { return q == p + 1; };
    blockforge::BlockSystem sys = detail::join_system(parts, consecutive);
    blockforge::AssembledSystem assembled = blockforge::chain(sys);
    Spectrum predicted = std::move(assembled.predicted);
    predicted.set_perron_at_max();
    double e = energy(predicted);
    return JoinResult{detail::join_adjacency(parts, consecutive), std::move(predicted), e,
                      std::move(assembled.small)};
}

}  // namespace spectralforge::graphspec
