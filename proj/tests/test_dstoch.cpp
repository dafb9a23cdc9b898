#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "spectralforge/dstoch.hpp"
#include "spectralforge/verify.hpp"
#include "test_support.hpp"

namespace nk = spectralforge::numkit;
namespace ds = spectralforge::dstoch;
namespace sv = spectralforge::verify;
using nk::Complex;
using nk::DenseMatrix;
using nk::Spectrum;

namespace {

ds::DSJoinSpec make_spec(DenseMatrix t1, DenseMatrix t2, Spectrum s1, Spectrum s2,
                         double alpha, double rho, ds::JoinMode mode) {
    ds::DSJoinSpec spec;
    spec.t1 = std::move(t1);
    spec.t2 = std::move(t2);
    spec.spec1 = std::move(s1);
    spec.spec2 = std::move(s2);
    spec.alpha = alpha;
    spec.rho = rho;
    spec.mode = mode;
    return spec;
}

}  // namespace

TEST(IsDoublyStochastic, HandComputedCases) {
    EXPECT_TRUE(ds::is_doubly_stochastic(DenseMatrix::identity(4)).doubly_stochastic);
    EXPECT_TRUE(ds::is_doubly_stochastic(
                    DenseMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}}))
                    .doubly_stochastic);

    ds::DSReport bad = ds::is_doubly_stochastic(
        DenseMatrix::from_rows({{0.6, 0.5}, {0.4, 0.5}}));
    EXPECT_FALSE(bad.doubly_stochastic);
    EXPECT_NEAR(bad.worst_sum_residual, 0.1, 1e-14);

    // Rows sum to 1 but an entry is negative.
    EXPECT_FALSE(ds::is_doubly_stochastic(
                     DenseMatrix::from_rows({{1.5, -0.5}, {-0.5, 1.5}}))
                     .doubly_stochastic);
    // Non-square is never doubly stochastic.
    EXPECT_FALSE(ds::is_doubly_stochastic(DenseMatrix(2, 3)).doubly_stochastic);
}

TEST(DsJoin, ZeroCouplingIsDirectSum) {
    DenseMatrix t1 = DenseMatrix::identity(2);
    DenseMatrix t2 = DenseMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    ds::DSJoinResult r = ds::ds_join(make_spec(t1, t2, sftest::reals({1.0, 1.0}),
                                               sftest::reals({1.0, -1.0}), 1.5, 0.0,
                                               ds::JoinMode::scaled));
    DenseMatrix want(4, 4);
    want(0, 0) = want(1, 1) = 1.0;
    want(2, 3) = want(3, 2) = 1.0;
    EXPECT_LE((r.d + want.scaled(-1.0)).max_norm(), 1e-15);
    EXPECT_TRUE(sv::match_spectra(r.predicted, sftest::reals({1.0, 1.0, 1.0, -1.0}),
                                  1e-12)
                    .matched);
}

TEST(DsJoin, EqualSizedIdentitiesWorkedExample) {
    // m = n = 2, alpha = rho = 1: predicted {1, 0, 1/2, 1/2}.
    DenseMatrix id = DenseMatrix::identity(2);
    ds::DSJoinResult r = ds::ds_join(make_spec(id, id, sftest::reals({1.0, 1.0}),
                                               sftest::reals({1.0, 1.0}), 1.0, 1.0,
                                               ds::JoinMode::scaled));
    ASSERT_EQ(r.predicted.size(), 4u);
    EXPECT_DOUBLE_EQ(r.predicted.values[0].real(), 1.0);
    EXPECT_NEAR(r.predicted.values[1].real(), 0.0, 1e-15);
    EXPECT_NEAR(r.predicted.values[2].real(), 0.5, 1e-15);
    EXPECT_NEAR(r.predicted.values[3].real(), 0.5, 1e-15);
    EXPECT_EQ(r.predicted.perron_index.value(), 0u);

    EXPECT_TRUE(ds::is_doubly_stochastic(r.d).doubly_stochastic);
    Spectrum oracle = nk::jacobi_eigs(r.d).spectrum;
    EXPECT_TRUE(sv::match_spectra(r.predicted, oracle, 1e-10).matched);
}

TEST(DsJoin, ZeroAlphaWithTraceZeroSecondBlock) {
    DenseMatrix t1(1, 1, {1.0});
    DenseMatrix t2 = DenseMatrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    ds::DSJoinResult r = ds::ds_join(make_spec(t1, t2, sftest::reals({1.0}),
                                               sftest::reals({1.0, -1.0}), 0.0, 1.0,
                                               ds::JoinMode::scaled));
    EXPECT_NEAR(r.d.trace(), 0.0, 1e-15);
    EXPECT_TRUE(ds::is_doubly_stochastic(r.d).doubly_stochastic);
}

TEST(DsJoinAffine, ZeroParametersGiveDirectSum) {
    DenseMatrix t1 = DenseMatrix::identity(2);
    DenseMatrix t2 = DenseMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
    ds::DSJoinResult r = ds::ds_join_affine(make_spec(t1, t2, sftest::reals({1.0, 1.0}),
                                                      sftest::reals({1.0, 0.0}), 0.0,
                                                      0.0, ds::JoinMode::affine));
    EXPECT_DOUBLE_EQ(r.d(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(r.d(2, 2), 0.5);
    EXPECT_DOUBLE_EQ(r.d(0, 2), 0.0);
    EXPECT_TRUE(sv::match_spectra(r.predicted, sftest::reals({1.0, 1.0, 1.0, 0.0}),
                                  1e-12)
                    .matched);
}

TEST(DsJoinAffine, IdentityBlocksWorkedExample) {
    // m = n = 2, alpha = 0, rho = 1: prefactor 1/2, predicted {1, 0, 1/2, 1/2}.
    DenseMatrix id = DenseMatrix::identity(2);
    ds::DSJoinResult r = ds::ds_join_affine(make_spec(id, id, sftest::reals({1.0, 1.0}),
                                                      sftest::reals({1.0, 1.0}), 0.0,
                                                      1.0, ds::JoinMode::affine));
    ASSERT_EQ(r.predicted.size(), 4u);
    EXPECT_DOUBLE_EQ(r.predicted.values[0].real(), 1.0);
    EXPECT_NEAR(r.predicted.values[1].real(), 0.0, 1e-15);
    EXPECT_NEAR(r.predicted.values[2].real(), 0.5, 1e-15);
    EXPECT_NEAR(r.predicted.values[3].real(), 0.5, 1e-15);

    EXPECT_TRUE(ds::is_doubly_stochastic(r.d).doubly_stochastic);
    EXPECT_LE(r.d.asymmetry(), 1e-15);
    Spectrum oracle = nk::jacobi_eigs(r.d).spectrum;
    EXPECT_TRUE(sv::match_spectra(r.predicted, oracle, 1e-10).matched);
}

TEST(DsJoin, DefectiveBlockIsHandled) {
    // T1 has eigenvalues {1, 0, 0} with a defective 0; no diagonalizability
    // assumption is needed for the prediction.
    DenseMatrix t1 = sftest::defective_ds3();
    DenseMatrix t2 = DenseMatrix::from_rows(
        {{0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}, {0.5, 0.5, 0.0}});
    ds::DSJoinResult r = ds::ds_join(make_spec(t1, t2, sftest::reals({1.0, 0.0, 0.0}),
                                               sftest::reals({1.0, -0.5, -0.5}), 1.0,
                                               0.7, ds::JoinMode::scaled));
    EXPECT_TRUE(ds::is_doubly_stochastic(r.d).doubly_stochastic);
    sv::MatchReport cert = sv::certify_eigenvalues(r.d, r.predicted);
    EXPECT_TRUE(cert.matched);
}

TEST(DsJoin, RandomPairsMatchOracle) {
    auto rng = sftest::make_rng(101);
    std::uniform_real_distribution<double> param(0.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t m = 2 + trial % 4;
        std::size_t n = m + trial % 3;
        DenseMatrix t1 = sftest::random_doubly_stochastic(rng, m);
        DenseMatrix t2 = sftest::random_doubly_stochastic(rng, n);
        Spectrum s1 = nk::qr_eigs_small(t1);
        Spectrum s2 = nk::qr_eigs_small(t2);
        double alpha = param(rng);
        double rho = param(rng);
        if (alpha + rho == 0.0) alpha = 1.0;
        bool affine = trial % 2 == 1;
        ds::DSJoinSpec spec =
            make_spec(t1, t2, s1, s2, alpha, rho,
                      affine ? ds::JoinMode::affine : ds::JoinMode::scaled);
        ds::DSJoinResult r = affine ? ds::ds_join_affine(spec) : ds::ds_join(spec);

        EXPECT_TRUE(ds::is_doubly_stochastic(r.d, 1e-10).doubly_stochastic);

        // Spectral radius is exactly the leading 1.
        EXPECT_DOUBLE_EQ(r.predicted.values[0].real(), 1.0);
        for (Complex z : r.predicted.values) EXPECT_LE(std::abs(z), 1.0 + 1e-12);

        // Second displayed value stays in [-m/n, 1].
        double second = r.predicted.values[1].real();
        double lo = -static_cast<double>(m) / static_cast<double>(n);
        EXPECT_GE(second, lo - 1e-12);
        EXPECT_LE(second, 1.0 + 1e-12);

        sv::MatchReport cert = sv::certify_eigenvalues(r.d, r.predicted);
        EXPECT_TRUE(cert.matched)
            << "trial " << trial << " worst residual " << cert.max_pair_distance;
    }
}

TEST(DsJoin, RejectsInvalidInput) {
    DenseMatrix big = DenseMatrix::identity(3);
    DenseMatrix small = DenseMatrix::identity(2);
    // m > n must be pre-swapped by the caller.
    EXPECT_THROW(ds::ds_join(make_spec(big, small, sftest::reals({1.0, 1.0, 1.0}),
                                       sftest::reals({1.0, 1.0}), 1.0, 1.0,
                                       ds::JoinMode::scaled)),
                 std::invalid_argument);
    // alpha = rho = 0 makes the scaled prefactor undefined.
    EXPECT_THROW(ds::ds_join(make_spec(small, big, sftest::reals({1.0, 1.0}),
                                       sftest::reals({1.0, 1.0, 1.0}), 0.0, 0.0,
                                       ds::JoinMode::scaled)),
                 std::invalid_argument);
    // Non doubly stochastic block.
    DenseMatrix rowsum = DenseMatrix::from_rows({{0.6, 0.5}, {0.4, 0.5}});
    EXPECT_THROW(ds::ds_join(make_spec(rowsum, big, sftest::reals({1.0, 0.1}),
                                       sftest::reals({1.0, 1.0, 1.0}), 1.0, 1.0,
                                       ds::JoinMode::scaled)),
                 std::invalid_argument);
    // Spectrum must lead with 1.
    EXPECT_THROW(ds::ds_join(make_spec(small, big, sftest::reals({0.5, 1.0}),
                                       sftest::reals({1.0, 1.0, 1.0}), 1.0, 1.0,
                                       ds::JoinMode::scaled)),
                 std::invalid_argument);
    // Mode mismatch is refused rather than silently rerouted.
    EXPECT_THROW(ds::ds_join(make_spec(small, big, sftest::reals({1.0, 1.0}),
                                       sftest::reals({1.0, 1.0, 1.0}), 1.0, 1.0,
                                       ds::JoinMode::affine)),
                 std::invalid_argument);
    EXPECT_THROW(ds::ds_join_affine(make_spec(small, big, sftest::reals({1.0, 1.0}),
                                              sftest::reals({1.0, 1.0, 1.0}), 1.0, 1.0,
                                              ds::JoinMode::scaled)),
                 std::invalid_argument);
}

TEST(DsJoin, SingleStateBlockIsAdmitted) {
    // m = 1: the join appends one state.
    DenseMatrix t1(1, 1, {1.0});
    DenseMatrix t2 = DenseMatrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
    ds::DSJoinResult r = ds::ds_join(make_spec(t1, t2, sftest::reals({1.0}),
                                               sftest::reals({1.0, 0.0}), 0.5, 1.0,
                                               ds::JoinMode::scaled));
    EXPECT_TRUE(ds::is_doubly_stochastic(r.d).doubly_stochastic);
    Spectrum oracle = nk::jacobi_eigs(r.d).spectrum;
    EXPECT_TRUE(sv::match_spectra(r.predicted, oracle, 1e-10).matched);
}
