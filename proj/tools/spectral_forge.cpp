// Command-line surface: parse inputs, run the constructions, audit the
// results, and emit matrices / spectra / energies as JSON, CSV or Matrix
// Market. Exit codes: 0 all audits passed, 1 input error, 2 audit failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spectralforge/blockforge.hpp"
#include "spectralforge/dstoch.hpp"
#include "spectralforge/graphspec.hpp"
#include "spectralforge/io.hpp"
#include "spectralforge/nonneg.hpp"
#include "spectralforge/numkit.hpp"
#include "spectralforge/verify.hpp"

namespace sf = spectralforge;
using json = nlohmann::ordered_json;
using sf::numkit::Complex;
using sf::numkit::DenseMatrix;
using sf::numkit::EigenPair;
using sf::numkit::Spectrum;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitAudit = 2;

struct CommonOpts {
    std::string input;
    std::string format = "json";
    std::string output;
    bool verify = false;
    double tol = 1e-8;
    std::uint64_t seed = 0;
};

double default_tolerance() {
    const char* env = std::getenv("SPECTRAL_FORGE_TOL");
    if (env == nullptr || *env == '\0') return 1e-8;
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == nullptr || *end != '\0' || !(v > 0.0)) {
        throw std::invalid_argument("SPECTRAL_FORGE_TOL must be a positive real, got \"" +
                                    std::string(env) + "\"");
    }
    return v;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_input) {
    if (with_input) {
        cmd->add_option("--input", opts.input, "input file")->required();
    }
    cmd->add_option("--format", opts.format, "output format: json, csv or mtx")
        ->check(CLI::IsMember({"json", "csv", "mtx"}));
    cmd->add_option("--output", opts.output, "write the artifact to this file");
    cmd->add_flag("--verify", opts.verify, "run the full oracle audit");
    cmd->add_option("--tol", opts.tol, "audit tolerance (default SPECTRAL_FORGE_TOL or 1e-8)");
    cmd->add_option("--seed", opts.seed, "rng seed recorded in the artifact");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file \"" + path + "\"");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("input file \"" + path + "\": " + e.what());
    }
    return j;
}

sf::graphspec::Graph read_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open graph file \"" + path + "\"");
    try {
        return sf::graphspec::read_edge_list(in);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

sf::graphspec::RegularGraph as_regular(sf::graphspec::Graph g, const std::string& name) {
    double d0 = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) d0 += g.adjacency()(0, j);
    try {
        return sf::graphspec::RegularGraph(std::move(g), static_cast<std::size_t>(d0));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(name + ": graph is not regular (" + e.what() + ")");
    }
}

/// Everything a command produces; the emitter turns it into the artifact.
struct CommandResult {
    json artifact;                          // full JSON artifact
    std::optional<DenseMatrix> matrix;      // for mtx output
    std::optional<Spectrum> spectrum;       // for csv output
    sf::verify::AuditReport audit;
};

int emit(const CommandResult& result, const CommonOpts& opts) {
    std::ostringstream body;
    if (opts.format == "json") {
        body << result.artifact.dump(2) << "\n";
    } else if (opts.format == "csv") {
        if (!result.spectrum) {
            throw std::invalid_argument("csv format requires a spectrum artifact");
        }
        sf::io::write_spectrum_csv(body, *result.spectrum);
    } else {
        if (!result.matrix) {
            throw std::invalid_argument("mtx format requires a matrix artifact");
        }
        sf::io::write_matrix_mtx(body, *result.matrix);
    }

    if (opts.output.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(opts.output);
        if (!out) {
            throw std::invalid_argument("cannot open output file \"" + opts.output + "\"");
        }
        out << body.str();
    }
    std::cerr << "audit " << result.audit.subject << ": "
              << (result.audit.passed ? "pass" : "FAIL") << " ("
              << result.audit.checks.size() << " checks)\n";
    if (!result.audit.passed) {
        std::cerr << result.audit.to_text();
        return kExitAudit;
    }
    return kExitOk;
}

json base_artifact(const std::string& command, const CommonOpts& opts) {
    return json{{"command", command}, {"seed", opts.seed}, {"tolerance", opts.tol}};
}

void attach_spectrum(json& artifact, const Spectrum& s) {
    artifact["spectrum"] = sf::io::spectrum_to_json(s);
    if (s.perron_index) {
        artifact["perron_index"] = *s.perron_index;
    } else {
        artifact["perron_index"] = nullptr;
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

CommandResult run_block_command(const std::string& command, const CommonOpts& opts,
                                double rho, double rho11, double rho22) {
    json input = read_json_file(opts.input);
    sf::blockforge::AssembledSystem assembled = [&] {
        if (command == "fiedler") {
            sf::numkit::detail::require(!input.is_object() || !input.contains("rho"),
                                        "fiedler: rho comes from --rho/--rho11/--rho22, "
                                        "not the input file");
            sf::blockforge::BlockSystem sys = sf::io::parse_block_system(input, false);
            sf::numkit::detail::require(sys.k() == 2,
                                        "fiedler: exactly 2 blocks required, got " +
                                            std::to_string(sys.k()));
            sys.rho = DenseMatrix(2, 2, {rho11, rho, rho, rho22});
            return sf::blockforge::assemble(sys);
        }
        sf::blockforge::BlockSystem sys = sf::io::parse_block_system(input, true);
        if (command == "chain") return sf::blockforge::chain(sys);
        return sf::blockforge::assemble(sys);
    }();

    sf::verify::AuditOptions aopt;
    aopt.tol = opts.tol;
    aopt.check_spectrum = opts.verify;
    sf::verify::AuditReport audit =
        sf::verify::audit(command, assembled.big, assembled.predicted, aopt);

    CommandResult result;
    result.artifact = base_artifact(command, opts);
    result.artifact["matrix"] = sf::io::matrix_to_json(assembled.big);
    result.artifact["small"] = sf::io::matrix_to_json(assembled.small);
    attach_spectrum(result.artifact, assembled.predicted);
    result.artifact["audit"] = sf::io::audit_to_json(audit);
    result.matrix = std::move(assembled.big);
    result.spectrum = std::move(assembled.predicted);
    result.audit = std::move(audit);
    return result;
}

CommandResult run_circulant(const CommonOpts& opts) {
    json input = read_json_file(opts.input);
    sf::numkit::detail::require(input.is_object(), "input must be a JSON object");
    sf::numkit::detail::require(input.contains("blocks"), "missing field \"blocks\"");
    sf::numkit::detail::require(input.contains("rho_first_row"),
                                "missing field \"rho_first_row\"");
    const json& jblocks = input["blocks"];
    sf::numkit::detail::require(jblocks.is_array() && !jblocks.empty(),
                                "\"blocks\" must be a non-empty array");

    std::vector<DenseMatrix> blocks;
    std::vector<Spectrum> spectra;
    std::vector<EigenPair> pairs;
    for (std::size_t b = 0; b < jblocks.size(); ++b) {
        std::string bp = "blocks[" + std::to_string(b) + "]";
        const json& blk = jblocks[b];
        sf::numkit::detail::require(blk.is_object(), bp + " must be an object");
        sf::numkit::detail::require(blk.contains("matrix"), "missing field " + bp + ".matrix");
        DenseMatrix m = sf::io::parse_matrix(blk["matrix"], bp + ".matrix");
        sf::numkit::detail::require(m.square(), bp + ".matrix must be square");
        auto nn = sf::nonneg::check_nonnegative(m, 0.0);
        sf::numkit::detail::require(nn.nonnegative,
                                    bp + ".matrix has a negative entry at (" +
                                        std::to_string(nn.i) + "," + std::to_string(nn.j) +
                                        ")");
        if (blk.contains("spectrum")) {
            spectra.push_back(sf::io::parse_spectrum(blk["spectrum"], bp + ".spectrum"));
        } else {
            sf::numkit::detail::require(m.is_symmetric(1e-12),
                                        bp + ".matrix is not symmetric, so the field " + bp +
                                            ".spectrum is required");
            spectra.push_back(sf::numkit::jacobi_eigs(m).spectrum);
        }
        sf::numkit::detail::require(blk.contains("eigenvalue") == blk.contains("eigenvector"),
                                    bp + " must supply eigenvalue and eigenvector together");
        if (blk.contains("eigenvalue")) {
            pairs.emplace_back(blk["eigenvalue"].get<double>(),
                               sf::io::parse_real_vector(blk["eigenvector"],
                                                         bp + ".eigenvector"));
        } else {
            pairs.push_back(sf::numkit::perron_pair(m));
        }
        blocks.push_back(std::move(m));
    }
    std::vector<double> rho_first_row =
        sf::io::parse_real_vector(input["rho_first_row"], "rho_first_row");

    sf::nonneg::CirculantResult cr =
        sf::nonneg::circulant_realize(spectra, blocks, rho_first_row, std::move(pairs));

    sf::verify::AuditOptions aopt;
    aopt.tol = opts.tol;
    aopt.check_spectrum = opts.verify;
    aopt.expect_nonnegative = true;
    sf::verify::AuditReport audit =
        sf::verify::audit("circulant", cr.system.big, cr.predicted, aopt);

    CommandResult result;
    result.artifact = base_artifact("circulant", opts);
    result.artifact["matrix"] = sf::io::matrix_to_json(cr.system.big);
    result.artifact["small"] = sf::io::matrix_to_json(cr.system.small);
    result.artifact["base_row"] = cr.plan.base_row;
    result.artifact["rho_full"] = sf::io::matrix_to_json(cr.plan.rho_full);
    attach_spectrum(result.artifact, cr.predicted);
    result.artifact["audit"] = sf::io::audit_to_json(audit);
    result.matrix = std::move(cr.system.big);
    result.spectrum = std::move(cr.predicted);
    result.audit = std::move(audit);
    return result;
}

CommandResult run_ds_join(const std::string& command, const CommonOpts& opts, double alpha,
                          double rho) {
    json input = read_json_file(opts.input);
    sf::numkit::detail::require(input.is_object(), "input must be a JSON object");
    sf::numkit::detail::require(input.contains("t1"), "missing field \"t1\"");
    sf::numkit::detail::require(input.contains("t2"), "missing field \"t2\"");
    sf::dstoch::DSJoinSpec spec;
    spec.t1 = sf::io::parse_matrix(input["t1"], "t1");
    spec.t2 = sf::io::parse_matrix(input["t2"], "t2");
    spec.alpha = alpha;
    spec.rho = rho;
    auto fill_spectrum = [&](const DenseMatrix& t, const char* field) {
        if (input.contains(field)) return sf::io::parse_spectrum(input[field], field);
        sf::numkit::detail::require(t.square() && t.is_symmetric(1e-12),
                                    std::string(field) == "spectrum1"
                                        ? "t1 is not symmetric, so the field \"spectrum1\" "
                                          "is required"
                                        : "t2 is not symmetric, so the field \"spectrum2\" "
                                          "is required");
        return sf::numkit::jacobi_eigs(t).spectrum;
    };
    spec.spec1 = fill_spectrum(spec.t1, "spectrum1");
    spec.spec2 = fill_spectrum(spec.t2, "spectrum2");
    spec.mode = (command == "ds-join") ? sf::dstoch::JoinMode::scaled
                                       : sf::dstoch::JoinMode::affine;

    sf::dstoch::DSJoinResult r = (spec.mode == sf::dstoch::JoinMode::scaled)
                                     ? sf::dstoch::ds_join(spec)
                                     : sf::dstoch::ds_join_affine(spec);

    sf::verify::AuditOptions aopt;
    aopt.tol = opts.tol;
    aopt.check_spectrum = opts.verify;
    aopt.expect_doubly_stochastic = true;
    aopt.expected_perron = 1.0;
    sf::verify::AuditReport audit = sf::verify::audit(command, r.d, r.predicted, aopt);

    CommandResult result;
    result.artifact = base_artifact(command, opts);
    result.artifact["alpha"] = alpha;
    result.artifact["rho"] = rho;
    result.artifact["matrix"] = sf::io::matrix_to_json(r.d);
    attach_spectrum(result.artifact, r.predicted);
    result.artifact["audit"] = sf::io::audit_to_json(audit);
    result.matrix = std::move(r.d);
    result.spectrum = std::move(r.predicted);
    result.audit = std::move(audit);
    return result;
}

CommandResult finish_join(const std::string& command, const CommonOpts& opts,
                          sf::graphspec::JoinResult r) {
    sf::verify::AuditOptions aopt;
    aopt.tol = opts.tol;
    aopt.check_spectrum = opts.verify;
    aopt.expect_symmetric = true;
    aopt.expect_zero_one = true;
    sf::verify::AuditReport audit =
        sf::verify::audit(command, r.joined.adjacency(), r.predicted, aopt);

    CommandResult result;
    result.artifact = base_artifact(command, opts);
    result.artifact["matrix"] = sf::io::matrix_to_json(r.joined.adjacency());
    result.artifact["small"] = sf::io::matrix_to_json(r.small);
    attach_spectrum(result.artifact, r.predicted);
    result.artifact["energy"] = r.energy;
    result.artifact["audit"] = sf::io::audit_to_json(audit);
    result.matrix = r.joined.adjacency();
    result.spectrum = std::move(r.predicted);
    result.audit = std::move(audit);
    return result;
}

std::vector<sf::graphspec::RegularGraph> load_parts(const std::vector<std::string>& files) {
    sf::numkit::detail::require(!files.empty(), "at least one part file required");
    std::vector<sf::graphspec::RegularGraph> parts;
    parts.reserve(files.size());
    for (const auto& f : files) parts.push_back(as_regular(read_graph_file(f), f));
    return parts;
}

std::vector<std::size_t> parse_sizes(const std::string& sizes) {
    std::vector<std::size_t> out;
    std::istringstream in(sizes);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t pos = 0;
            long long v = std::stoll(tok, &pos);
            if (pos != tok.size() || v < 1) throw std::invalid_argument("");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw std::invalid_argument("--sizes: \"" + tok +
                                        "\" is not a positive integer");
        }
    }
    sf::numkit::detail::require(!out.empty(), "--sizes: empty size list");
    return out;
}

CommandResult run_verify(const CommonOpts& opts) {
    json input = read_json_file(opts.input);
    sf::numkit::detail::require(input.is_object(), "input must be a JSON object");
    sf::numkit::detail::require(input.contains("matrix"), "missing field \"matrix\"");
    sf::numkit::detail::require(input.contains("spectrum"), "missing field \"spectrum\"");
    DenseMatrix m = sf::io::parse_matrix(input["matrix"], "matrix");
    Spectrum s = sf::io::parse_spectrum(input["spectrum"], "spectrum");

    sf::verify::AuditOptions aopt;
    aopt.tol = opts.tol;
    aopt.check_spectrum = true;
    if (input.contains("expect")) {
        const json& e = input["expect"];
        sf::numkit::detail::require(e.is_object(), "\"expect\" must be an object");
        aopt.expect_symmetric = e.value("symmetric", false);
        aopt.expect_nonnegative = e.value("nonnegative", false);
        aopt.expect_doubly_stochastic = e.value("doubly_stochastic", false);
        aopt.expect_zero_one = e.value("zero_one", false);
        if (e.contains("energy")) {
            aopt.expected_energy = e["energy"].get<double>();
        }
        if (e.contains("perron")) {
            aopt.expected_perron = e["perron"].get<double>();
            s.set_perron_at_max();
        }
    }
    sf::verify::AuditReport audit = sf::verify::audit("verify", m, s, aopt);

    CommandResult result;
    result.artifact = base_artifact("verify", opts);
    result.artifact["matrix"] = sf::io::matrix_to_json(m);
    attach_spectrum(result.artifact, s);
    result.artifact["audit"] = sf::io::audit_to_json(audit);
    result.matrix = std::move(m);
    result.spectrum = std::move(s);
    result.audit = std::move(audit);
    return result;
}

CommandResult run_energy(const CommonOpts& opts) {
    json input = read_json_file(opts.input);
    sf::numkit::detail::require(input.is_object(), "input must be a JSON object");
    bool has_spectrum = input.contains("spectrum");
    bool has_matrix = input.contains("matrix");
    sf::numkit::detail::require(has_spectrum != has_matrix,
                                "provide exactly one of \"spectrum\" or \"matrix\"");

    CommandResult result;
    result.artifact = base_artifact("energy", opts);
    Spectrum s;
    if (has_spectrum) {
        s = sf::io::parse_spectrum(input["spectrum"], "spectrum");
    } else {
        DenseMatrix m = sf::io::parse_matrix(input["matrix"], "matrix");
        sf::numkit::detail::require(m.is_symmetric(1e-12),
                                    "matrix is not symmetric; supply \"spectrum\" instead");
        s = sf::numkit::jacobi_eigs(m).spectrum;
        result.matrix = std::move(m);
        result.artifact["matrix"] = sf::io::matrix_to_json(*result.matrix);
    }
    result.artifact["energy"] = sf::graphspec::energy(s);
    attach_spectrum(result.artifact, s);
    result.audit.subject = "energy";
    result.audit.finalize();
    result.artifact["audit"] = sf::io::audit_to_json(result.audit);
    result.spectrum = std::move(s);
    return result;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"block-matrix spectra: construction, prediction, verification"};
    app.require_subcommand(1);

    CommonOpts opts;
    try {
        opts.tol = default_tolerance();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }

    double rho = 0.0, rho11 = 0.0, rho22 = 0.0, alpha = 0.0;
    std::vector<std::string> part_files;
    std::string part_file;
    std::string sizes_csv;
    std::uint64_t copies = 1;

    CLI::App* c_assemble = app.add_subcommand("assemble", "assemble a block system");
    add_common(c_assemble, opts, true);

    CLI::App* c_fiedler = app.add_subcommand("fiedler", "two-block scalar coupling");
    add_common(c_fiedler, opts, true);
    c_fiedler->add_option("--rho", rho, "cross coupling")->required();
    c_fiedler->add_option("--rho11", rho11, "first diagonal coupling");
    c_fiedler->add_option("--rho22", rho22, "second diagonal coupling");

    CLI::App* c_chain = app.add_subcommand("chain", "tridiagonal-by-blocks coupling");
    add_common(c_chain, opts, true);

    CLI::App* c_circ = app.add_subcommand("circulant", "circulant spectrum realization");
    add_common(c_circ, opts, true);

    CLI::App* c_ds = app.add_subcommand("ds-join", "scaled doubly stochastic join");
    add_common(c_ds, opts, true);
    c_ds->add_option("--alpha", alpha, "first-block weight")->required();
    c_ds->add_option("--rho", rho, "cross coupling")->required();

    CLI::App* c_dsa = app.add_subcommand("ds-join-affine", "affine doubly stochastic join");
    add_common(c_dsa, opts, true);
    c_dsa->add_option("--alpha", alpha, "rank-one diagonal weight")->required();
    c_dsa->add_option("--rho", rho, "cross coupling")->required();

    CLI::App* c_gjoin = app.add_subcommand("graph-join", "join of regular graphs");
    add_common(c_gjoin, opts, false);
    c_gjoin->add_option("--parts", part_files, "edge-list files")->required()->expected(-1);

    CLI::App* c_multi = app.add_subcommand("multipartite", "complete multipartite graph");
    add_common(c_multi, opts, false);
    c_multi->add_option("--sizes", sizes_csv, "comma-separated part sizes")->required();

    CLI::App* c_iso = app.add_subcommand("iso-join", "join of isomorphic copies");
    add_common(c_iso, opts, false);
    c_iso->add_option("--part", part_file, "edge-list file")->required();
    c_iso->add_option("--copies", copies, "number of copies")->required();

    CLI::App* c_cjoin = app.add_subcommand("chain-join", "chain join of regular graphs");
    add_common(c_cjoin, opts, false);
    c_cjoin->add_option("--parts", part_files, "edge-list files")->required()->expected(-1);

    CLI::App* c_verify = app.add_subcommand("verify", "audit a matrix/spectrum pair");
    add_common(c_verify, opts, true);

    CLI::App* c_energy = app.add_subcommand("energy", "energy of a spectrum or matrix");
    add_common(c_energy, opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        CommandResult result;
        if (c_assemble->parsed()) {
            result = run_block_command("assemble", opts, 0.0, 0.0, 0.0);
        } else if (c_fiedler->parsed()) {
            result = run_block_command("fiedler", opts, rho, rho11, rho22);
        } else if (c_chain->parsed()) {
            result = run_block_command("chain", opts, 0.0, 0.0, 0.0);
        } else if (c_circ->parsed()) {
            result = run_circulant(opts);
        } else if (c_ds->parsed()) {
            result = run_ds_join("ds-join", opts, alpha, rho);
        } else if (c_dsa->parsed()) {
            result = run_ds_join("ds-join-affine", opts, alpha, rho);
        } else if (c_gjoin->parsed()) {
            result = finish_join("graph-join", opts, sf::graphspec::join_all(load_parts(part_files)));
        } else if (c_multi->parsed()) {
            result = finish_join("multipartite", opts,
                                 sf::graphspec::complete_multipartite(parse_sizes(sizes_csv)));
        } else if (c_iso->parsed()) {
            sf::graphspec::RegularGraph g = as_regular(read_graph_file(part_file), part_file);
            Spectrum s = sf::numkit::jacobi_eigs(g.adjacency()).spectrum;
            result = finish_join("iso-join", opts,
                                 sf::graphspec::join_isomorphic_copies(g, s, copies));
        } else if (c_cjoin->parsed()) {
            result = finish_join("chain-join", opts,
                                 sf::graphspec::chain_join(load_parts(part_files)));
        } else if (c_verify->parsed()) {
            result = run_verify(opts);
        } else {
            result = run_energy(opts);
        }
        return emit(result, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
