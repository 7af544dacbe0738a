#pragma once

#include "homctl/plant.hpp"
#include "homctl/switching.hpp"
#include "homctl/synthesis.hpp"

namespace homctl::scenarios {

/// Finite-time demo: two 4-state, 2-input modes with matched disturbance (E = B).
SwitchedPlant ft_plant();
/// Nearly fixed-time demo: two 4-state, 2-input modes with E = I.
SwitchedPlant nfxt_plant();

/// The same plants with A_1(1,3) set to 0, which admits a common homogenization.
SwitchedPlant ft_plant_variant();
SwitchedPlant nfxt_plant_variant();

SwitchedPlant chain2();
SwitchedPlant chain4();

constexpr double kFtMu = -0.1;
constexpr double kFtRho = 2.0;
constexpr double kNfxtMu = 1.0;
constexpr double kNfxtRho = 1.0;

/// Degrees used on the nearly fixed-time variant, inside its admissible window (-1, 0.5).
constexpr double kNfxtVariantMu = 0.25;
constexpr double kNfxtVariantNegativeMu = -0.25;

Vector ft_x0();
Vector nfxt_x0();

/// 0.8 sin(10 t) on input channel 1.
DisturbanceSpec ft_disturbance();
/// [0.5 cos 2t, 0.4 sin 5t, 0.4 sin 5t, 0.3 cos 3t].
DisturbanceSpec nfxt_disturbance();

/// Square-wave stand-in for the demo switching signal: 1 s in each mode, starting in mode 1.
SwitchingPolicy demo_switching();

/// Controller built from the published finite-time gains (K_sigma, P_sigma, Gd, mu = -0.1, K0 = 0).
Controller ft_reference_controller();

}  // namespace homctl::scenarios
