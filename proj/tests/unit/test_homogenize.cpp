#include "homctl/error.hpp"
#include "homctl/homogenize.hpp"
#include "homctl/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace homctl;

namespace {

Matrix diag(std::initializer_list<double> v) {
    Vector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d[i++] = x;
    return d.asDiagonal();
}

// Independent check of the defining equations from the returned matrices.
void expect_equations_hold(const SwitchedPlant& plant, const HomogenizationResult& h, double tol) {
    const Eigen::Index n = plant.n();
    for (std::size_t k = 0; k < plant.mode_count(); ++k) {
        const Mode& md = plant.mode(k);
        EXPECT_LT((md.A * h.G0 - h.G0 * md.A + md.B * h.Y0[k] - md.A).norm(), tol);
        EXPECT_LT((h.G0 * md.B).norm(), tol);
        EXPECT_LT((h.A0[k] * h.Gd - (h.Gd + h.mu * Matrix::Identity(n, n)) * h.A0[k]).norm(), tol);
        EXPECT_LT((h.Gd * md.B - md.B).norm(), tol);
        EXPECT_LT((h.A0[k] - md.A - md.B * h.K0[k]).norm(), tol);
        EXPECT_LT((h.K0[k] * (h.G0 - Matrix::Identity(n, n)) - h.Y0[k]).norm(), tol);
    }
    EXPECT_LT((h.Gd - Matrix::Identity(n, n) - h.mu * h.G0).norm(), 1e-15);
}

}  // namespace

TEST(Homogenize, TwoChain) {
    const auto plant = scenarios::chain2();
    const auto h = solve_homogenization(plant, -0.5);
    EXPECT_LT((h.G0 - diag({-1, 0})).norm(), 1e-12);
    EXPECT_LT(h.Y0[0].norm(), 1e-12);
    EXPECT_LT(h.K0[0].norm(), 1e-12);
    EXPECT_LT((h.Gd - diag({1.5, 1})).norm(), 1e-12);
    expect_equations_hold(plant, h, 1e-10);
    EXPECT_TRUE(is_nilpotent(h.A0[0]));
}

TEST(Homogenize, FourChain) {
    const auto plant = scenarios::chain4();
    const auto h = solve_homogenization(plant, -0.1);
    EXPECT_LT((h.G0 - diag({-3, -2, -1, 0})).norm(), 1e-10);
    EXPECT_LT((h.Gd - diag({1.3, 1.2, 1.1, 1.0})).norm(), 1e-10);
    EXPECT_LT(h.Y0[0].norm(), 1e-10);
    expect_equations_hold(plant, h, 1e-10);
}

TEST(Homogenize, PrintedFiniteTimePlantHasNoCommonSolution) {
    const auto plant = scenarios::ft_plant();
    const auto lsq = homogenization_least_squares(plant);
    EXPECT_NEAR(lsq.relative_residual, 0.1767, 1e-3);
    try {
        solve_homogenization(plant, scenarios::kFtMu);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_NEAR(e.measure(), lsq.relative_residual, 1e-12);
    }
    // Each mode on its own is homogenizable.
    for (std::size_t k = 0; k < 2; ++k) {
        const SwitchedPlant single({plant.mode(k)});
        EXPECT_LT(homogenization_least_squares(single).relative_residual, 1e-10);
    }
}

TEST(Homogenize, VariantPlantSolves) {
    const auto plant = scenarios::ft_plant_variant();
    const auto h = solve_homogenization(plant, scenarios::kFtMu);
    EXPECT_LT((h.G0 - diag({-3, -2, -1, 0})).norm(), 1e-10);
    expect_equations_hold(plant, h, 1e-8);
    for (const auto& a0 : h.A0) EXPECT_TRUE(is_nilpotent(a0));
    EXPECT_TRUE(is_anti_hurwitz(h.Gd).anti_hurwitz);
}

TEST(Homogenize, NearlyFixedTimeDegreeOutsideWindow) {
    const auto plant = scenarios::nfxt_plant_variant();
    EXPECT_THROW(solve_homogenization(plant, 1.0), PreconditionError);
    const auto h = solve_homogenization(plant, scenarios::kNfxtVariantMu);
    EXPECT_NEAR(h.admissible.upper, 0.5, 1e-10);
    EXPECT_NEAR(h.admissible.lower, -1.0, 1e-12);
    expect_equations_hold(plant, h, 1e-8);
    EXPECT_THROW(solve_homogenization(scenarios::nfxt_plant(), scenarios::kNfxtVariantMu), InfeasibleError);
}

TEST(Homogenize, RejectsDegreeBelowMinusOne) {
    EXPECT_THROW(solve_homogenization(scenarios::chain2(), -1.5), PreconditionError);
}

TEST(Homogenize, AdmissibleWindowFromSpectrum) {
    const auto w = admissible_degrees(diag({-1, 0}));
    EXPECT_NEAR(w.upper, 1.0, 1e-14);
    EXPECT_NEAR(w.lower, -1.0, 1e-14);
    const auto w2 = admissible_degrees(diag({-2, 0.5}));
    EXPECT_NEAR(w2.upper, 0.5, 1e-14);
    EXPECT_NEAR(w2.lower, -1.0, 1e-14);
    const auto w3 = admissible_degrees(diag({-2, 4}));
    EXPECT_NEAR(w3.lower, -0.25, 1e-14);
}

TEST(Homogenize, DegreeTransferToDilations) {
    const auto h = solve_homogenization(scenarios::ft_plant_variant(), -0.1);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& a0 : h.A0) {
        ASSERT_TRUE(check_commutator_degree(a0, h.Gd, h.mu).pass);
        for (int i = 0; i < 20; ++i) {
            const double s = u(rng);
            const Matrix d = mat_exp(h.Gd, s);
            EXPECT_LT((a0 * d - std::exp(h.mu * s) * d * a0).norm(), 1e-8);
        }
    }
}

TEST(Homogenize, LinearInPlantScale) {
    // Scaling every A and B by c leaves G0 unchanged and scales Y0 by c.
    const auto base = scenarios::ft_plant_variant();
    std::vector<Mode> scaled;
    for (const auto& md : base.modes()) scaled.push_back({3.0 * md.A, 3.0 * md.B, 3.0 * md.E});
    const auto a = homogenization_least_squares(base);
    const auto b = homogenization_least_squares(SwitchedPlant(scaled));
    EXPECT_LT((a.G0 - b.G0).norm(), 1e-9);
    for (std::size_t k = 0; k < a.Y0.size(); ++k) EXPECT_LT((3.0 * a.Y0[k] - b.Y0[k]).norm(), 1e-9);
}

TEST(Commutator, Examples) {
    const Matrix gd = diag({1.5, 1});
    const auto z = check_commutator_degree(Matrix::Zero(2, 2), gd, 0.7);
    EXPECT_EQ(z.residual, 0.0);
    EXPECT_TRUE(z.pass);
    Matrix a(2, 2);
    a << 0, 1, 0, 0;
    const auto c = check_commutator_degree(a, gd, -0.5);
    EXPECT_NEAR(c.residual, 0.0, 1e-15);
    EXPECT_TRUE(c.pass);
    const auto i = check_commutator_degree(Matrix::Identity(2, 2), gd, -0.5);
    EXPECT_NEAR(i.residual, 0.5 * std::sqrt(2.0), 1e-14);
    EXPECT_FALSE(i.pass);
}

TEST(DilationOfInput, Examples) {
    Matrix b = Matrix::Zero(4, 1);
    b(3, 0) = 1.0;
    EXPECT_TRUE(verify_dilation_of_input(diag({1.3, 1.2, 1.1, 1.0}), b));
    EXPECT_FALSE(verify_dilation_of_input(diag({0.6, 0.7, 0.8, 0.9}), scenarios::ft_plant().mode(0).B));
    Matrix gd = diag({1.5, 1.0});
    gd(0, 1) = 0.3;
    EXPECT_FALSE(verify_dilation_of_input(gd, (Matrix(2, 1) << 0, 1).finished()));
    EXPECT_TRUE(verify_dilation_of_input(diag({1.5, 1.0}), (Matrix(2, 1) << 0, 1).finished()));
}
