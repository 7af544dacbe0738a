#include "homctl/scenarios.hpp"

namespace homctl::scenarios {

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    Matrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix ft_a1(double a13) { return mat({{0, 2, a13, 0}, {0, 0, 3, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}}); }
Matrix nfxt_a1(double a13) { return mat({{0, 2, a13, 0}, {0, 0, 3, 0}, {0, 2, 0, 1}, {0, 1, 0, 0}}); }

SwitchedPlant ft(double a13) {
    const Matrix b1 = mat({{0, 0}, {0, 0}, {0, 0}, {1, 2}});
    const Matrix a2 = mat({{0, 1, 0, 0}, {0, 0, 3, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}});
    return SwitchedPlant({{ft_a1(a13), b1, b1}, {a2, -b1, -b1}});
}

SwitchedPlant nfxt(double a13) {
    const Matrix b1 = mat({{0, 0}, {0, 0}, {0, 0.1}, {1, 0}});
    const Matrix a2 = mat({{0, 1, 0, 0}, {0, 0, 3, 0}, {0, 4, 0, 1}, {0, 1, 0, 0}});
    const Matrix b2 = mat({{0, 0}, {0, 0}, {0, 2}, {1, 0}});
    const Matrix e = Matrix::Identity(4, 4);
    return SwitchedPlant({{nfxt_a1(a13), b1, e}, {a2, b2, e}});
}

}  // namespace

SwitchedPlant ft_plant() { return ft(2.0); }
SwitchedPlant nfxt_plant() { return nfxt(2.0); }
SwitchedPlant ft_plant_variant() { return ft(0.0); }
SwitchedPlant nfxt_plant_variant() { return nfxt(0.0); }

SwitchedPlant chain2() { return SwitchedPlant({{mat({{0, 1}, {0, 0}}), mat({{0}, {1}}), {}}}); }

SwitchedPlant chain4() {
    return SwitchedPlant({{mat({{0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}}), mat({{0}, {0}, {0}, {1}}), {}}});
}

Vector ft_x0() { return (Vector(4) << 2, 0, 0, 0).finished(); }
Vector nfxt_x0() { return (Vector(4) << -3, 0, 0, 3).finished(); }

DisturbanceSpec ft_disturbance() { return DisturbanceSpec::matched_sinusoid({0.8, 10.0, 0.0, Waveform::kSin}, 0); }

DisturbanceSpec nfxt_disturbance() {
    return DisturbanceSpec::sinusoid_sum({{{0.5, 2.0, 0.0, Waveform::kCos}},
                                          {{0.4, 5.0, 0.0, Waveform::kSin}},
                                          {{0.4, 5.0, 0.0, Waveform::kSin}},
                                          {{0.3, 3.0, 0.0, Waveform::kCos}}});
}

SwitchingPolicy demo_switching() { return SwitchingPolicy::periodic(1.0, {0, 1}); }

Controller ft_reference_controller() {
    const Matrix k1 = mat({{-40.7387, -14.1629, -30.3225, -3.7321}, {-81.4773, -28.3257, -60.6449, -7.4643}});
    const Matrix p1 = mat({{81.8695, 7.8511, 31.8486, 3.0001},
                           {7.8511, 2.9934, 5.1863, 0.5323},
                           {31.8486, 5.1863, 14.8742, 1.4720},
                           {3.0001, 0.5323, 1.4720, 0.1753}});
    const Matrix k2 = mat({{67.7426, 37.6748, 27.7519, 3.7321}, {135.4852, 75.3497, 55.5037, 7.4643}});
    const Matrix p2 = mat({{235.3985, 103.6428, 55.1037, 5.1875},
                           {103.6428, 47.1603, 26.0054, 2.5019},
                           {55.1037, 26.0054, 15.1619, 1.5323},
                           {5.1875, 2.5019, 1.5323, 0.1825}});
    const Matrix gd = Vector((Vector(4) << 0.6, 0.7, 0.8, 0.9).finished()).asDiagonal();
    const Matrix k0 = Matrix::Zero(2, 4);
    return controller_from_gains(kFtMu, gd, {p1, p2}, {k1, k2}, {k0, k0}, {kFtRho, kFtRho});
}

}  // namespace homctl::scenarios
