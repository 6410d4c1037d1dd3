#include <ppsim/hilbert.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "test_util.hpp"

namespace {

using namespace ppsim;
using ppsim_test::cd;
using Mat = Matrix<double>;
using Vec = Vector<double>;

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

TEST(StateVector, NormalizesOnConstruction) {
    Vec v(3);
    v << cd(3, 0), cd(0, 4), cd(0, 0);
    StateVector<double> s(v);
    EXPECT_NEAR(s.amps().norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(s.amps()[0]), 0.6, 1e-15);
}

TEST(StateVector, RejectsZeroAndNonFinite) {
    Vec zero = Vec::Zero(2);
    EXPECT_THROW(StateVector<double>{zero}, std::invalid_argument);
    Vec bad(2);
    bad << cd(std::nan(""), 0), cd(1, 0);
    EXPECT_THROW(StateVector<double>{bad}, std::invalid_argument);
}

TEST(StateVector, FactorProductMustMatchDim) {
    Vec v = Vec::Ones(4);
    EXPECT_NO_THROW(StateVector<double>(v, {2, 2}));
    EXPECT_THROW(StateVector<double>(v, {2, 3}), std::invalid_argument);
}

TEST(Inner, SelfInnerIsOne) {
    std::mt19937_64 rng(7);
    auto s = ppsim_test::random_state(5, rng);
    const cd val = inner(s, s);
    EXPECT_NEAR(val.real(), 1.0, 1e-12);
    EXPECT_NEAR(val.imag(), 0.0, 1e-12);
}

TEST(Inner, ThreeBoxOverlapIsOneThird) {
    Vec pre(3), post(3);
    pre << cd(1), cd(1), cd(1);
    post << cd(1), cd(1), cd(-1);
    const cd val = inner(StateVector<double>(post), StateVector<double>(pre));
    EXPECT_NEAR(val.real(), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(val.imag(), 0.0, 1e-15);
}

TEST(Inner, GhzOverlapIsOneHalf) {
    Vec pre = Vec::Zero(8);
    pre[0] = cd(1);
    pre[7] = cd(-1);
    const StateVector<double> in(pre);
    const StateVector<double> fin =
        kron(kron(qubit_down_x<double>(), qubit_down_x<double>()), qubit_down_x<double>());
    const cd val = inner(fin, in);
    EXPECT_NEAR(val.real(), 0.5, 1e-15);
    EXPECT_NEAR(val.imag(), 0.0, 1e-15);
}

TEST(Inner, DimensionMismatchThrows) {
    Vec a = Vec::Ones(2), b = Vec::Ones(3);
    EXPECT_THROW(inner(StateVector<double>(a), StateVector<double>(b)), std::invalid_argument);
}

TEST(Inner, ConjugateLinearInFirstArgument) {
    Vec a(2), b(2);
    a << cd(0, 1), cd(1, 0);
    b << cd(1, 0), cd(0, 0);
    // <a|b> = conj(i) * 1 / |a| = -i / sqrt(2)
    const cd val = inner(StateVector<double>(a), StateVector<double>(b));
    EXPECT_NEAR(val.real(), 0.0, 1e-15);
    EXPECT_NEAR(val.imag(), -1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Kron, IdentityTimesIdentity) {
    const Mat i4 = kron(identity<double>(2), identity<double>(2));
    EXPECT_NEAR(max_abs(i4 - identity<double>(4)), 0.0, 1e-15);
}

TEST(Kron, SigmaXXFlipsUpUp) {
    const StateVector<double> upup = kron(qubit_up<double>(), qubit_up<double>());
    const StateVector<double> downdown = kron(qubit_down<double>(), qubit_down<double>());
    const Vec flipped = kron(sigma_x<double>(), sigma_x<double>()) * upup.amps();
    EXPECT_NEAR((flipped - downdown.amps()).norm(), 0.0, 1e-15);
}

TEST(Kron, SigmaZZOnUpDownGivesMinus) {
    const StateVector<double> updown = kron(qubit_up<double>(), qubit_down<double>());
    const Vec out = kron(sigma_z<double>(), sigma_z<double>()) * updown.amps();
    EXPECT_NEAR((out + updown.amps()).norm(), 0.0, 1e-15);
}

TEST(Kron, AssociativeAndMixedProduct) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Mat a = ppsim_test::random_matrix(2, 2, rng);
        const Mat b = ppsim_test::random_matrix(3, 3, rng);
        const Mat c = ppsim_test::random_matrix(2, 2, rng);
        const Mat d = ppsim_test::random_matrix(3, 3, rng);
        // Associativity (A x B) x C = A x (B x C), entrywise.
        const Mat left = kron(kron(a, b), c);
        const Mat right = kron(a, kron(b, c));
        // Entries are products of three standard-normal-ish values; compare
        // against a scale-aware bound.
        EXPECT_LT(max_abs(left - right), 1e-15 * (1.0 + max_abs(left)));
        // Mixed product (A x B)(C x D) = AC x BD.
        const Mat lhs = kron(a, b) * kron(c, d);
        const Mat rhs = kron((a * c).eval(), (b * d).eval());
        EXPECT_LT(max_abs(lhs - rhs), 1e-12);
    }
}

TEST(PauliAlgebra, CyclicProducts) {
    const cd i(0, 1);
    EXPECT_NEAR(max_abs(sigma_x<double>() * sigma_y<double>() - i * sigma_z<double>()), 0.0, 1e-15);
    EXPECT_NEAR(max_abs(sigma_y<double>() * sigma_z<double>() - i * sigma_x<double>()), 0.0, 1e-15);
    EXPECT_NEAR(max_abs(sigma_z<double>() * sigma_x<double>() - i * sigma_y<double>()), 0.0, 1e-15);
}

TEST(PauliString, SingleQubitProjectors) {
    const auto sx = pauli_string<double>({{0, Axis::x}}, 1, "X");
    ASSERT_EQ(sx.spectrum().size(), 2u);
    const Mat plus = (identity<double>(2) + sigma_x<double>()) / 2.0;
    const Mat minus = (identity<double>(2) - sigma_x<double>()) / 2.0;
    EXPECT_NEAR(max_abs(sx.projector(1.0) - plus), 0.0, 1e-15);
    EXPECT_NEAR(max_abs(sx.projector(-1.0) - minus), 0.0, 1e-15);
}

TEST(PauliString, TwoSiteStringIsInvolution) {
    const auto xy = pauli_string<double>({{0, Axis::x}, {1, Axis::y}}, 2);
    EXPECT_NEAR(max_abs(xy.op() * xy.op() - identity<double>(4)), 0.0, 1e-15);
}

TEST(PauliString, SquareRowProductIsPlusIdentity) {
    // First row of the two-qubit observable square: X1 * X2 * X1X2 = +I.
    const auto x1 = pauli_string<double>({{0, Axis::x}}, 2);
    const auto x2 = pauli_string<double>({{1, Axis::x}}, 2);
    const auto x1x2 = pauli_string<double>({{0, Axis::x}, {1, Axis::x}}, 2);
    const Mat prod = x1.op() * x2.op() * x1x2.op();
    EXPECT_NEAR(max_abs(prod - identity<double>(4)), 0.0, 1e-15);
}

TEST(PauliString, SquareColumnThreeProductIsMinusIdentity) {
    const auto x1x2 = pauli_string<double>({{0, Axis::x}, {1, Axis::x}}, 2);
    const auto y1y2 = pauli_string<double>({{0, Axis::y}, {1, Axis::y}}, 2);
    const auto z1z2 = pauli_string<double>({{0, Axis::z}, {1, Axis::z}}, 2);
    const Mat prod = x1x2.op() * y1y2.op() * z1z2.op();
    EXPECT_NEAR(max_abs(prod + identity<double>(4)), 0.0, 1e-15);
}

TEST(PauliString, DisjointSiteStringsCommute) {
    std::mt19937_64 rng(13);
    const Axis axes[] = {Axis::x, Axis::y, Axis::z};
    std::uniform_int_distribution<int> pick(0, 2);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = pauli_string<double>({{0, axes[pick(rng)]}}, 3);
        const auto b = pauli_string<double>({{1, axes[pick(rng)]}, {2, axes[pick(rng)]}}, 3);
        const Mat comm = a.op() * b.op() - b.op() * a.op();
        EXPECT_LT(max_abs(comm), 1e-12);
    }
}

TEST(PauliString, DuplicateSiteThrows) {
    EXPECT_THROW(pauli_string<double>({{0, Axis::x}, {0, Axis::y}}, 2), std::invalid_argument);
}

TEST(PauliString, SiteOutOfRangeThrows) {
    EXPECT_THROW(pauli_string<double>({{2, Axis::x}}, 2), std::invalid_argument);
}

TEST(ProjectorObservable, RankOneInDimThree) {
    Vec a = Vec::Zero(3);
    a[0] = cd(1);
    const Mat proj = a * a.adjoint();
    const auto obs = projector_observable<double>("P_A", proj);
    ASSERT_EQ(obs.spectrum().size(), 2u);
    EXPECT_DOUBLE_EQ(obs.spectrum()[0].first, 1.0);
    EXPECT_DOUBLE_EQ(obs.spectrum()[1].first, 0.0);
}

TEST(ProjectorObservable, IdentityHasSingleEigenvalue) {
    const auto obs = projector_observable<double>("one", identity<double>(3));
    ASSERT_EQ(obs.spectrum().size(), 1u);
    EXPECT_DOUBLE_EQ(obs.spectrum()[0].first, 1.0);
}

TEST(ProjectorObservable, ZeroHasSingleEigenvalue) {
    const Mat zero = Mat::Zero(3, 3);
    const auto obs = projector_observable<double>("zero", zero);
    ASSERT_EQ(obs.spectrum().size(), 1u);
    EXPECT_DOUBLE_EQ(obs.spectrum()[0].first, 0.0);
}

TEST(ProjectorObservable, JointMinusMinusBoxProjectorIsIdempotent) {
    // N-- = ((I - S13)/2)((I - S23)/2) with S13 = x@0 y@1, S23 = y@0 x@1;
    // the two strings commute, so the product of their minus-projectors is
    // itself a projector.
    const auto s13 = pauli_string<double>({{0, Axis::x}, {1, Axis::y}}, 2);
    const auto s23 = pauli_string<double>({{0, Axis::y}, {1, Axis::x}}, 2);
    const Mat n_minus_minus = s13.projector(-1.0) * s23.projector(-1.0);
    EXPECT_LT(max_abs(n_minus_minus * n_minus_minus - n_minus_minus), 1e-12);
    EXPECT_LT(max_abs(n_minus_minus - n_minus_minus.adjoint()), 1e-12);
    EXPECT_NO_THROW(projector_observable<double>("N--", n_minus_minus));
}

TEST(ProjectorObservable, NonIdempotentThrows) {
    Mat m(2, 2);
    m << cd(0.5), cd(0.5), cd(0.5), cd(0.6);
    EXPECT_THROW(projector_observable<double>("bad", m), std::invalid_argument);
}

TEST(SpectralObservable, ConstructorsSatisfyReconstruction) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        const int groups = 2 + static_cast<int>(rng() % static_cast<unsigned>(dim - 1));
        const auto obs = ppsim_test::random_spectral_observable(dim, groups, rng);
        Mat recon = Mat::Zero(dim, dim);
        Mat proj_sum = Mat::Zero(dim, dim);
        for (const auto& [eig, proj] : obs.spectrum()) {
            recon += cd(eig) * proj;
            proj_sum += proj;
        }
        EXPECT_LT(max_abs(recon - obs.op()), 1e-10);
        EXPECT_LT(max_abs(proj_sum - identity<double>(dim)), 1e-10);
    }
}

TEST(SpectralObservable, RejectsDuplicateEigenvalues) {
    const Mat eye = identity<double>(2);
    const Mat p0 = (eye + sigma_z<double>()) / 2.0;
    const Mat p1 = (eye - sigma_z<double>()) / 2.0;
    std::vector<SpectralObservable<double>::Branch> spec;
    spec.emplace_back(1.0, p0);
    spec.emplace_back(1.0, p1);
    EXPECT_THROW(SpectralObservable<double>("dup", eye, spec), std::invalid_argument);
}

TEST(SpectralObservable, RejectsBadReconstruction) {
    const Mat eye = identity<double>(2);
    const Mat p0 = (eye + sigma_z<double>()) / 2.0;
    const Mat p1 = (eye - sigma_z<double>()) / 2.0;
    std::vector<SpectralObservable<double>::Branch> spec;
    spec.emplace_back(1.0, p0);
    spec.emplace_back(-1.0, p1);
    // Claimed operator is sigma_x, but the spectrum reconstructs sigma_z.
    EXPECT_THROW(SpectralObservable<double>("bad", sigma_x<double>(), spec),
                 std::invalid_argument);
}

}  // namespace
