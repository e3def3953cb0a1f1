#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "abcms/models.hpp"

namespace abcms {

// Limit of the summary map: theta -> b(theta), the observed-summary
// limit b0, and the parameter box the solver searches.
struct LimitMaps {
    std::function<SummaryVec(const ThetaVec&)> binding;
    SummaryVec b0;
    std::vector<std::pair<double, double>> box;  // per-component (lo, hi)

    int k_theta() const { return static_cast<int>(box.size()); }
};

SummaryVec binding_normal(double theta);          // (theta, 1)
SummaryVec b0_normal(double theta0, double sigma2);  // (theta0, sigma2)
SummaryVec binding_gk(const ThetaVec& theta);     // quantile septet
// Population octiles of the Gaussian mixture by bisection on its CDF.
SummaryVec b0_mixture(double w, double mu1, double s21, double mu2, double s22);

LimitMaps limit_maps_normal(double theta0, double sigma2);
LimitMaps limit_maps_gk_mixture(double w = 0.9, double mu1 = 1.0, double s21 = 2.0,
                                double mu2 = 7.0, double s22 = 2.0);

struct RestartTrace {
    int restart = 0;
    double objective = 0.0;
    long iterations = 0;
    bool converged = false;
    ThetaVec argmin;
};

struct PseudoTrueResult {
    ThetaVec theta_star;
    double eps_star = 0.0;
    std::vector<RestartTrace> trace;
};

// Multistart simplex descent for theta* = arg inf ||b0 - b(theta)||.
// Starts are a seed-scrambled Halton sequence over the box; the box is
// enforced by quadratic penalty. Best converged restart wins, ties by
// restart index.
PseudoTrueResult solve_pseudo_true(const LimitMaps& maps, int restarts,
                                   std::uint64_t seed, int threads = 1);

struct RegPseudoTrue {
    ThetaVec value;
    bool inside_box = true;
};

// theta* - beta0 (b(theta*) - b0). May leave the box; flagged, not clamped.
RegPseudoTrue reg_pseudo_true(const ThetaVec& theta_star,
                              const std::vector<double>& beta0,  // k_theta x k_eta
                              const LimitMaps& maps);

} // namespace abcms
