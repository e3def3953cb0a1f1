#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "abcms/models.hpp"
#include "abcms/posterior.hpp"
#include "abcms/reference_table.hpp"

namespace abcms {

// Epanechnikov kernel K_eps(t) = (3/4) eps^-1 (1 - (t/eps)^2) on t <= eps.
double epanechnikov_weight(double t, double eps);

// Weighted local-linear fit of each parameter component on
// X_i = eta(z_i) - eta_obs, shared design across components.
struct RegressionFit {
    int k_theta = 0;
    int k_eta = 0;
    std::vector<double> intercepts;  // k_theta
    std::vector<double> slopes;      // k_theta * k_eta, row j = beta for comp j
    SummaryVec center;               // eta_obs the design was centered at
    double weight_sum = 0.0;

    double slope(int comp, int j) const {
        return slopes[static_cast<std::size_t>(comp) * static_cast<std::size_t>(k_eta) +
                      static_cast<std::size_t>(j)];
    }
    // fitted conditional mean at summary vector eta
    double predict(int comp, std::span<const double> eta) const;
};

RegressionFit fit_local_linear(const PosteriorDraws& p, const ReferenceTable& table,
                               const SummaryVec& eta_obs);

// theta_i - B (eta(z_i) - eta_obs)
PosteriorDraws adjust_linear(const PosteriorDraws& p, const ReferenceTable& table,
                             const RegressionFit& fit);

// Mean of M_sim simulated summaries at theta_hat under the assumed model.
SummaryVec regn_center(const Scenario& sc, const ThetaVec& theta_hat, int M_sim,
                       std::uint64_t master_seed);

// theta_i + B (eta_hat - eta(z_i)); coincides with adjust_linear when
// eta_hat = eta_obs.
PosteriorDraws adjust_regn(const PosteriorDraws& p, const ReferenceTable& table,
                           const RegressionFit& fit, const SummaryVec& eta_hat);

struct NnConfig {
    int hidden = 5;
    int epochs = 500;
    double step = 0.01;
    double decay = 1e-4;
    std::uint64_t seed = 0;
};

// Single-hidden-layer logistic network fit by full-batch adaptive
// gradient descent on standardized inputs/outputs, with a closing exact
// weighted ridge solve of the output layer. Deterministic given seed.
struct NonlinearFit {
    int k_eta = 0;
    int k_theta = 0;
    int hidden = 0;
    std::vector<double> w1;  // k_eta * hidden
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden * k_theta
    std::vector<double> b2;  // k_theta
    std::vector<double> x_mean, x_sd;  // k_eta
    std::vector<double> y_mean, y_sd;  // k_theta
    SummaryVec center;                 // eta_obs used for the design shift

    ThetaVec predict(std::span<const double> eta) const;
};

NonlinearFit fit_nonlinear(const PosteriorDraws& p, const ReferenceTable& table,
                           const SummaryVec& eta_obs, const NnConfig& cfg = {});

// theta_i + { m(eta_obs) - m(eta(z_i)) }
PosteriorDraws adjust_nonlinear(const PosteriorDraws& p, const ReferenceTable& table,
                                const NonlinearFit& fit);

// Heteroskedasticity correction:
//   m(center) + (theta_i - m(eta_i)) * sigma(center) / sigma(eta_i)
// where log sigma^2 is a second-stage fit (same family as the first
// stage) of log(residual^2 + 1e-12) on the same design. `center` is
// eta_obs for RegC/NNC and the RegN recentering summary for RegNC.
PosteriorDraws hetero_correct(const PosteriorDraws& p, const ReferenceTable& table,
                              const RegressionFit& fit, const SummaryVec& center,
                              MethodTag out_tag);
PosteriorDraws hetero_correct(const PosteriorDraws& p, const ReferenceTable& table,
                              const NonlinearFit& fit, const SummaryVec& center,
                              MethodTag out_tag, const NnConfig& cfg = {});

} // namespace abcms
