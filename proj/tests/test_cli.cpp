#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

// SPECTRAL_FORGE_BIN is injected by the build; every test shells out to the
// real binary, so this suite exercises parsing, dispatch, emission and exit
// codes end to end.

namespace {

using nlohmann::json;

struct CliRun {
    int status = -1;
    std::string out;
};

CliRun run_shell(const std::string& command) {
    CliRun r;
    FILE* pipe = popen(command.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

// Captures stdout; stderr is discarded.
CliRun run_cli(const std::string& args) {
    return run_shell(std::string(SPECTRAL_FORGE_BIN) + " " + args + " 2>/dev/null");
}

// Captures stderr; stdout is discarded.
CliRun run_cli_stderr(const std::string& args) {
    return run_shell(std::string(SPECTRAL_FORGE_BIN) + " " + args + " 2>&1 1>/dev/null");
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = testing::TempDir() + "sfcli_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::vector<double> sorted_reals(const json& artifact) {
    std::vector<double> vals;
    for (const auto& entry : artifact.at("spectrum")) {
        vals.push_back(entry.at(0).get<double>());
    }
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals;
}

const char* kC4 = "4 4\n0 1\n1 2\n2 3\n3 0\n";
const char* kP3 = "3 2\n0 1\n1 2\n";

}  // namespace

TEST(CliMultipartite, ArtifactCarriesSpectrumEnergyAndAudit) {
    CliRun r = run_cli("multipartite --sizes 3,3");
    ASSERT_EQ(r.status, 0);
    json j = json::parse(r.out);
    EXPECT_EQ(j["command"], "multipartite");
    EXPECT_EQ(j["seed"].get<std::uint64_t>(), 0u);
    EXPECT_DOUBLE_EQ(j["tolerance"].get<double>(), 1e-8);
    EXPECT_TRUE(j["audit"]["passed"].get<bool>());
    EXPECT_NEAR(j["energy"].get<double>(), 6.0, 1e-8);
    ASSERT_EQ(j["spectrum"].size(), 6u);
    std::vector<double> vals = sorted_reals(j);
    std::vector<double> want = {3.0, 0.0, 0.0, 0.0, 0.0, -3.0};
    for (size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(vals[i], want[i], 1e-8);
    ASSERT_FALSE(j["perron_index"].is_null());
    EXPECT_EQ(j["matrix"].size(), 6u);
    // The audit verdict also lands on stderr.
    CliRun e = run_cli_stderr("multipartite --sizes 3,3");
    EXPECT_NE(e.out.find("audit multipartite: pass"), std::string::npos) << e.out;
}

TEST(CliMultipartite, RerunsAreByteIdentical) {
    CliRun a = run_cli("multipartite --sizes 2,3,4 --seed 9");
    CliRun b = run_cli("multipartite --sizes 2,3,4 --seed 9");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_FALSE(a.out.empty());
}

TEST(CliFormats, CsvEchoesSpectrumInCanonicalOrder) {
    std::string in = write_temp("csv.json", R"({
        "matrix": [[2.0, 1.0], [1.0, 2.0]],
        "spectrum": [[1.0, 0.0], [3.0, 0.0]]
    })");
    CliRun r = run_cli("verify --input " + in + " --format csv");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "re,im\n3,0\n1,0\n");
}

TEST(CliFormats, MtxListsAdjacencyNonzeros) {
    CliRun r = run_cli("multipartite --sizes 1,1 --format mtx");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out,
              "%%MatrixMarket matrix coordinate real general\n"
              "2 2 2\n"
              "1 2 1\n"
              "2 1 1\n");
}

TEST(CliFormats, OutputFlagRedirectsTheArtifact) {
    std::string path = testing::TempDir() + "sfcli_artifact.json";
    CliRun direct = run_cli("multipartite --sizes 2,2");
    CliRun filed = run_cli("multipartite --sizes 2,2 --output " + path);
    ASSERT_EQ(filed.status, 0);
    EXPECT_TRUE(filed.out.empty());
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    EXPECT_EQ(content, direct.out);
}

TEST(CliFormats, SeedAndTolAreRecorded) {
    std::string in = write_temp("seed.json", R"({
        "matrix": [[1.0]],
        "spectrum": [[1.0, 0.0]]
    })");
    CliRun r = run_cli("verify --input " + in + " --seed 7 --tol 0.5");
    ASSERT_EQ(r.status, 0);
    json j = json::parse(r.out);
    EXPECT_EQ(j["seed"].get<std::uint64_t>(), 7u);
    EXPECT_DOUBLE_EQ(j["tolerance"].get<double>(), 0.5);
}

TEST(CliBlocks, FiedlerCouplesTwoBlocksFromFile) {
    std::string in = write_temp("fiedler.json", R"({
        "blocks": [{"matrix": [[0.0]]}, {"matrix": [[0.0]]}]
    })");
    CliRun r = run_cli("fiedler --input " + in + " --rho 1 --verify");
    ASSERT_EQ(r.status, 0);
    json j = json::parse(r.out);
    std::vector<double> vals = sorted_reals(j);
    ASSERT_EQ(vals.size(), 2u);
    EXPECT_NEAR(vals[0], 1.0, 1e-12);
    EXPECT_NEAR(vals[1], -1.0, 1e-12);
    EXPECT_TRUE(j.contains("small"));

    // Couplings come from flags; a rho field in the file is a mistake.
    std::string bad = write_temp("fiedler_rho.json", R"({
        "blocks": [{"matrix": [[0.0]]}, {"matrix": [[0.0]]}],
        "rho": [[0.0, 1.0], [1.0, 0.0]]
    })");
    CliRun e = run_cli_stderr("fiedler --input " + bad + " --rho 1");
    EXPECT_EQ(e.status, 1);
    EXPECT_NE(e.out.find("--rho"), std::string::npos) << e.out;
}

TEST(CliBlocks, CirculantRealizesRequestedCouplings) {
    std::string in = write_temp("circ.json", R"({
        "blocks": [{"matrix": [[0.0]]}, {"matrix": [[0.0]]}],
        "rho_first_row": [0.0, 1.0]
    })");
    CliRun r = run_cli("circulant --input " + in + " --verify");
    ASSERT_EQ(r.status, 0);
    json j = json::parse(r.out);
    EXPECT_EQ(j["perron_index"].get<int>(), 0);
    std::vector<double> vals = sorted_reals(j);
    ASSERT_EQ(vals.size(), 2u);
    EXPECT_NEAR(vals[0], 1.0, 1e-12);
    EXPECT_NEAR(vals[1], -1.0, 1e-12);
    ASSERT_EQ(j["base_row"].size(), 2u);
    EXPECT_EQ(j["rho_full"].size(), 2u);
}

TEST(CliJoins, DoublyStochasticJoinsKeepLeadingOne) {
    std::string in = write_temp("ds.json", R"({
        "t1": [[1.0]],
        "t2": [[0.5, 0.5], [0.5, 0.5]]
    })");
    CliRun scaled = run_cli("ds-join --input " + in + " --alpha 1 --rho 1 --verify");
    ASSERT_EQ(scaled.status, 0);
    json js = json::parse(scaled.out);
    EXPECT_DOUBLE_EQ(js["spectrum"][0][0].get<double>(), 1.0);
    EXPECT_EQ(js["perron_index"].get<int>(), 0);
    EXPECT_TRUE(js["audit"]["passed"].get<bool>());

    CliRun affine =
        run_cli("ds-join-affine --input " + in + " --alpha 0.5 --rho 0.5 --verify");
    ASSERT_EQ(affine.status, 0);
    json ja = json::parse(affine.out);
    EXPECT_DOUBLE_EQ(ja["spectrum"][0][0].get<double>(), 1.0);
    EXPECT_EQ(ja["command"], "ds-join-affine");
}

TEST(CliJoins, GraphJoinComputesEnergyAndRejectsIrregularParts) {
    std::string c4a = write_temp("c4a.txt", kC4);
    std::string c4b = write_temp("c4b.txt", kC4);
    CliRun r = run_cli("graph-join --parts " + c4a + " " + c4b + " --verify");
    ASSERT_EQ(r.status, 0);
    json j = json::parse(r.out);
    EXPECT_NEAR(j["energy"].get<double>(), 12.0, 1e-8);
    EXPECT_EQ(j["spectrum"].size(), 8u);
    EXPECT_NEAR(sorted_reals(j)[0], 6.0, 1e-8);

    std::string p3 = write_temp("p3.txt", kP3);
    CliRun e = run_cli_stderr("graph-join --parts " + c4a + " " + p3);
    EXPECT_EQ(e.status, 1);
    EXPECT_NE(e.out.find("not regular"), std::string::npos) << e.out;
}

TEST(CliJoins, IsoJoinReplicatesOnePart) {
    std::string c4 = write_temp("c4iso.txt", kC4);
    CliRun r = run_cli("iso-join --part " + c4 + " --copies 3 --verify");
    ASSERT_EQ(r.status, 0);
    json j = json::parse(r.out);
    EXPECT_EQ(j["spectrum"].size(), 12u);
    EXPECT_NEAR(j["energy"].get<double>(), 20.0, 1e-8);
    EXPECT_NEAR(j["spectrum"][0][0].get<double>(), 10.0, 1e-8);
    EXPECT_EQ(j["perron_index"].get<int>(), 0);
}

TEST(CliJoins, ChainJoinOfTwoPartsMatchesPlainJoin) {
    std::string c4a = write_temp("c4ca.txt", kC4);
    std::string c4b = write_temp("c4cb.txt", kC4);
    CliRun chain = run_cli("chain-join --parts " + c4a + " " + c4b);
    CliRun join = run_cli("graph-join --parts " + c4a + " " + c4b);
    ASSERT_EQ(chain.status, 0);
    json jc = json::parse(chain.out);
    json jj = json::parse(join.out);
    EXPECT_EQ(jc["spectrum"], jj["spectrum"]);
    EXPECT_EQ(jc["matrix"], jj["matrix"]);
}

TEST(CliVerify, AuditFailureExitsTwo) {
    std::string good = write_temp("vgood.json", R"({
        "matrix": [[2.0, 1.0], [1.0, 2.0]],
        "spectrum": [[3.0, 0.0], [1.0, 0.0]],
        "expect": {"symmetric": true, "energy": 4.0, "perron": 3.0}
    })");
    EXPECT_EQ(run_cli("verify --input " + good).status, 0);

    std::string bad = write_temp("vbad.json", R"({
        "matrix": [[2.0, 1.0], [1.0, 2.0]],
        "spectrum": [[3.1, 0.0], [1.0, 0.0]]
    })");
    CliRun e = run_cli_stderr("verify --input " + bad);
    EXPECT_EQ(e.status, 2);
    EXPECT_NE(e.out.find("FAIL"), std::string::npos) << e.out;
}

TEST(CliVerify, EnvironmentToleranceIsHonored) {
    std::string in = write_temp("vtol.json", R"({
        "matrix": [[2.0, 1.0], [1.0, 2.0]],
        "spectrum": [[3.001, 0.0], [0.999, 0.0]]
    })");
    std::string bin = SPECTRAL_FORGE_BIN;
    EXPECT_EQ(run_cli("verify --input " + in).status, 2);

    CliRun loose =
        run_shell("SPECTRAL_FORGE_TOL=1e-2 " + bin + " verify --input " + in + " 2>/dev/null");
    ASSERT_EQ(loose.status, 0);
    EXPECT_DOUBLE_EQ(json::parse(loose.out)["tolerance"].get<double>(), 1e-2);

    // An explicit flag beats the environment.
    CliRun flag = run_shell("SPECTRAL_FORGE_TOL=1e-12 " + bin + " verify --input " + in +
                            " --tol 1e-2 2>/dev/null");
    EXPECT_EQ(flag.status, 0);

    CliRun junk = run_shell("SPECTRAL_FORGE_TOL=abc " + bin + " verify --input " + in +
                            " 2>&1 1>/dev/null");
    EXPECT_EQ(junk.status, 1);
    EXPECT_NE(junk.out.find("SPECTRAL_FORGE_TOL"), std::string::npos) << junk.out;
}

TEST(CliEnergy, AcceptsSpectrumOrSymmetricMatrix) {
    std::string spec = write_temp("egspec.json", R"({"spectrum": [[3.0, 0.0], [-1.0, 0.0]]})");
    CliRun r = run_cli("energy --input " + spec);
    ASSERT_EQ(r.status, 0);
    EXPECT_DOUBLE_EQ(json::parse(r.out)["energy"].get<double>(), 4.0);

    std::string both = write_temp("egboth.json",
                                  R"({"spectrum": [[1.0, 0.0]], "matrix": [[1.0]]})");
    EXPECT_EQ(run_cli("energy --input " + both).status, 1);

    std::string asym = write_temp("egasym.json", R"({"matrix": [[0.0, 1.0], [0.0, 0.0]]})");
    CliRun e = run_cli_stderr("energy --input " + asym);
    EXPECT_EQ(e.status, 1);
    EXPECT_NE(e.out.find("supply \"spectrum\" instead"), std::string::npos) << e.out;
}

TEST(CliErrors, BadInvocationsExitOne) {
    EXPECT_EQ(run_cli("verify --input /nonexistent/file.json").status, 1);
    std::string mangled = write_temp("mangled.json", "{ not json");
    EXPECT_EQ(run_cli("verify --input " + mangled).status, 1);
    EXPECT_EQ(run_cli("no-such-command").status, 1);
    EXPECT_EQ(run_cli("").status, 1);
    EXPECT_EQ(run_cli("multipartite --sizes 3,3 --format yaml").status, 1);
    EXPECT_EQ(run_cli("multipartite --sizes 0").status, 1);
    EXPECT_EQ(run_cli("verify").status, 1);
}
