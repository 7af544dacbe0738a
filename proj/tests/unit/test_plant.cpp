#include "homctl/error.hpp"
#include "homctl/io.hpp"
#include "homctl/plant.hpp"
#include "homctl/scenarios.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace homctl;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "homctl_unit";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Plant, LoadsBundledFiniteTimeFixture) {
    const SwitchedPlant p = load_plant(fs::path(HOMCTL_DATA_DIR) / "ft_plant.json");
    EXPECT_EQ(p.n(), 4);
    EXPECT_EQ(p.m(), 2);
    EXPECT_EQ(p.mode_count(), 2u);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(p.mode(k).E, p.mode(k).B);
}

TEST(Plant, MissingInputColumnIsDimensionError) {
    Json j = plant_to_json(scenarios::ft_plant());
    for (auto& row : j["modes"][0]["B"]) row.erase(1);
    j["modes"][0].erase("E");
    EXPECT_THROW(plant_from_json(j), DimensionError);
}

TEST(Plant, SingleModeChain) {
    const SwitchedPlant p = load_plant(fs::path(HOMCTL_DATA_DIR) / "chain2_plant.json");
    EXPECT_EQ(p.mode_count(), 1u);
    EXPECT_EQ(p.n(), 2);
}

TEST(Plant, UncontrollableModeIsNamed) {
    Mode good{scenarios::chain2().mode(0).A, scenarios::chain2().mode(0).B, {}};
    Mode bad{Matrix::Zero(2, 2), (Matrix(2, 1) << 1, 0).finished(), {}};
    try {
        SwitchedPlant p({good, bad});
        FAIL() << "expected ModeError";
    } catch (const ModeError& e) {
        EXPECT_EQ(e.mode(), 1u);
        EXPECT_NE(std::string(e.what()).find("mode 2"), std::string::npos);
    }
}

TEST(Plant, DisturbanceMatrixDefaultsToInput) {
    const Json j = {{"modes", {{{"A", {{0, 1}, {0, 0}}}, {"B", {{0}, {1}}}}}}};
    const SwitchedPlant p = plant_from_json(j);
    EXPECT_EQ(p.mode(0).E, p.mode(0).B);
    EXPECT_EQ(p.p(), 1);
}

TEST(Plant, DeclaredSizeMismatchRejected) {
    Json j = plant_to_json(scenarios::chain2());
    j["n"] = 3;
    EXPECT_THROW(plant_from_json(j), DimensionError);
}

TEST(Plant, MalformedFileIsParseError) {
    const fs::path f = temp_file("broken.json");
    std::ofstream(f) << "{ not json";
    EXPECT_THROW(load_plant(f), ParseError);
    EXPECT_THROW(load_plant(temp_file("does_not_exist.json")), ParseError);
}

TEST(Plant, SaveLoadRoundTripIsBitExact) {
    SwitchedPlant p = scenarios::nfxt_plant();
    Mode extra = p.mode(0);
    extra.A(0, 1) = 0.1 + 0.2;  // not exactly representable in short decimal
    extra.E(2, 3) = 1.0 / 3.0;
    SwitchedPlant q({p.mode(0), extra});
    const fs::path f = temp_file("roundtrip.json");
    save_plant(q, f);
    const SwitchedPlant r = load_plant(f);
    for (std::size_t k = 0; k < q.mode_count(); ++k) {
        EXPECT_EQ(r.mode(k).A, q.mode(k).A);
        EXPECT_EQ(r.mode(k).B, q.mode(k).B);
        EXPECT_EQ(r.mode(k).E, q.mode(k).E);
    }
}

TEST(Disturbance, NoneIsZero) {
    const Vector w = eval_disturbance(DisturbanceSpec::none(), 1.234, Vector::Ones(4), 2);
    EXPECT_EQ(w, Vector::Zero(2));
}

TEST(Disturbance, MatchedSinusoidPeak) {
    const Vector w = eval_disturbance(scenarios::ft_disturbance(), M_PI / 20.0, Vector::Zero(4), 2);
    EXPECT_NEAR(w[0], 0.8, 1e-15);
    EXPECT_EQ(w[1], 0.0);
}

TEST(Disturbance, FourChannelAtZero) {
    const Vector w = eval_disturbance(scenarios::nfxt_disturbance(), 0.0, Vector::Zero(4), 4);
    EXPECT_EQ(w, (Vector(4) << 0.5, 0.0, 0.0, 0.3).finished());
}

TEST(Disturbance, ValidationAndBound) {
    EXPECT_THROW(validate_disturbance(scenarios::nfxt_disturbance(), 2), PreconditionError);
    EXPECT_THROW(validate_disturbance(DisturbanceSpec::matched_sinusoid({NAN, 1.0, 0.0, Waveform::kSin}), 1),
                 PreconditionError);
    EXPECT_NO_THROW(validate_disturbance(scenarios::ft_disturbance(), 2));
    EXPECT_DOUBLE_EQ(disturbance_bound(scenarios::ft_disturbance()), 0.8);
    EXPECT_NEAR(disturbance_bound(scenarios::nfxt_disturbance()), std::sqrt(0.25 + 0.16 + 0.16 + 0.09), 1e-15);
    for (double t = 0.0; t < 5.0; t += 0.01) {
        EXPECT_LE(eval_disturbance(scenarios::nfxt_disturbance(), t, Vector::Zero(4), 4).norm(),
                  disturbance_bound(scenarios::nfxt_disturbance()) + 1e-15);
    }
}

TEST(Fixtures, BundledFilesMatchEmbeddedScenarios) {
    const fs::path d(HOMCTL_DATA_DIR);
    auto same_plant = [](const SwitchedPlant& a, const SwitchedPlant& b) {
        if (a.mode_count() != b.mode_count()) return false;
        for (std::size_t k = 0; k < a.mode_count(); ++k) {
            if (a.mode(k).A != b.mode(k).A || a.mode(k).B != b.mode(k).B || a.mode(k).E != b.mode(k).E) return false;
        }
        return true;
    };
    EXPECT_TRUE(same_plant(load_plant(d / "ft_plant.json"), scenarios::ft_plant()));
    EXPECT_TRUE(same_plant(load_plant(d / "nfxt_plant.json"), scenarios::nfxt_plant()));
    EXPECT_TRUE(same_plant(load_plant(d / "ft_plant_variant.json"), scenarios::ft_plant_variant()));
    EXPECT_TRUE(same_plant(load_plant(d / "nfxt_plant_variant.json"), scenarios::nfxt_plant_variant()));
    EXPECT_TRUE(same_plant(load_plant(d / "chain2_plant.json"), scenarios::chain2()));
    EXPECT_EQ(read_json_file(d / "ft_disturbance.json"), disturbance_to_json(scenarios::ft_disturbance()));
    EXPECT_EQ(read_json_file(d / "nfxt_disturbance.json"), disturbance_to_json(scenarios::nfxt_disturbance()));
    EXPECT_EQ(read_json_file(d / "demo_switching.json"), policy_to_json(scenarios::demo_switching()));
    EXPECT_EQ(read_json_file(d / "ft_reference_controller.json"),
              controller_to_json(scenarios::ft_reference_controller()));
}

TEST(Fixtures, PrintedMatricesVerbatim) {
    const SwitchedPlant p = scenarios::ft_plant();
    Matrix a1(4, 4);
    a1 << 0, 2, 2, 0, 0, 0, 3, 0, 0, 0, 0, 1, 0, 0, 0, 0;
    EXPECT_EQ(p.mode(0).A, a1);
    EXPECT_EQ(p.mode(0).B, (Matrix(4, 2) << 0, 0, 0, 0, 0, 0, 1, 2).finished());
    EXPECT_EQ(p.mode(1).B, (Matrix(4, 2) << 0, 0, 0, 0, 0, 0, -1, -2).finished());
    EXPECT_EQ(scenarios::ft_plant_variant().mode(0).A(0, 2), 0.0);
}
