#pragma once

#include "homctl/homogenize.hpp"
#include "homctl/hnorm.hpp"
#include "homctl/lmi.hpp"
#include "homctl/plant.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace homctl {

enum class ControllerKind { kCommon, kMultiple };

const char* to_string(ControllerKind k);

/// Slack of the decay LMI and of the strictness conditions, measured on stored matrices.
struct LmiCertificate {
    double lmi_min_eig = 0.0;     ///< min_eig_sym(-(X A0^T + A0 X + B Y + Y^T B^T + rho (Gd X + X Gd^T)))
    double dilation_min_eig = 0.0; ///< min_eig_sym(Gd X + X Gd^T)
    double x_min_eig = 0.0;
    double scale = 1.0;            ///< lambda_max(X)
    double margin = 1e-6;
    bool pass = false;
};

LmiCertificate certify_lmi(const Matrix& X, const Matrix& Y, const Matrix& A0, const Matrix& B, const Matrix& Gd,
                           double rho, double margin = 1e-6);

struct ModeGains {
    Matrix X;
    Matrix P;
    Matrix Y;
    Matrix K;
    Matrix K0;
    double rho = 0.0;
    double k_tilde = 0.0;
    LmiCertificate certificate;
};

struct Controller {
    ControllerKind kind = ControllerKind::kCommon;
    double mu = 0.0;
    Matrix Gd;
    std::vector<ModeGains> modes;
    std::optional<double> gamma;
    std::optional<double> c1;
    std::optional<double> c2;

    std::size_t mode_count() const noexcept { return modes.size(); }
    double rho_min() const;
    /// Dilation context of the Lyapunov function active in `sigma` (every mode shares one for kind common).
    DilationContext context(std::size_t sigma) const;
    std::vector<DilationContext> contexts() const;
};

/// Requested decay rate: a value or automatic maximization.
struct AutoRho {};
using RhoSpec = std::variant<double, AutoRho>;

struct SynthesisOptions {
    double margin = 1e-6;
    double x_bound = 1.0;          ///< normalization X <= x_bound I
    double y_bound = 1e2;          ///< spectral-norm cap on every Y during the max-slack stage
    double rho_lower = 1e-4;
    double rho_cap = 1e6;
    double rho_rel_width = 1e-3;
    double rho_backoff = 0.95;
    std::size_t samples = 20000;   ///< sphere samples for gamma, c1, c2
    std::uint64_t seed = 0;
};

Controller synthesize_common(const SwitchedPlant& plant, const HomogenizationResult& homog, RhoSpec rho,
                             const SynthesisOptions& opts = {});

/// `rho` holds one entry per mode (or a single entry applied to all modes); empty means auto.
Controller synthesize_multiple(const SwitchedPlant& plant, const HomogenizationResult& homog,
                               const std::vector<RhoSpec>& rho, const SynthesisOptions& opts = {});

/// sqrt(lambda_max(X^(1/2) K^T K X^(1/2))).
double control_effort_bound(const Matrix& X, const Matrix& K);

/// Mode-jump factor from sphere sampling with a 5% safety factor (never below 1).
double estimate_gamma(const Controller& controller, std::size_t samples, std::uint64_t seed = 0);

struct NormEquivalence {
    double c1 = 0.0;
    double c2 = 0.0;
};

NormEquivalence estimate_c1_c2(const Controller& controller, std::size_t samples, std::uint64_t seed = 0);

double adt_bound(double gamma, double rho_min);

double min_dwell_ft(double gamma, double rho_min, double mu, double V0);

/// Closed-form state-dependent dwell time from explicit constants; ref_norm is ||x||_d of mode 1.
double sddt_tau_from(double ref_norm, double mu, double gamma, double c1, double c2, double rho_min);

double sddt_tau(const Controller& controller, const Vector& x_at_switch);

/// Assemble a multiple-kind controller from given matrices, e.g. published gains.
/// Certificates are left unset.
Controller controller_from_gains(double mu, const Matrix& gd, const std::vector<Matrix>& P, const std::vector<Matrix>& K,
                                 const std::vector<Matrix>& K0, const std::vector<double>& rho);

}  // namespace homctl
