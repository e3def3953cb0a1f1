#pragma once

#include <string>
#include <vector>

#include "abcms/rng.hpp"

namespace abcms {

using ThetaVec = std::vector<double>;
using SummaryVec = std::vector<double>;

enum class ScenarioKind { normal, gk_mixture, prop1 };
enum class SummaryKind { mean_var, octiles, prop1_pair };
enum class Which { assumed, true_dgp };

// How reference-table summaries are produced for the g-and-k scenario:
// octiles of an inverse-transform sample of length n, or the analytic
// quantile septet of the distribution itself (zero simulation noise).
enum class GkTableSummaries { simulated, analytic };

struct Scenario {
    ScenarioKind kind = ScenarioKind::normal;
    int n = 100;

    // normal: assumed N(theta,1); true DGP N(theta0, sigma2)
    double theta0 = 1.0;
    double sigma2 = 1.0;

    // gk-mixture true DGP: w N(mu1,s21) + (1-w) N(mu2,s22), variances
    double mix_w = 0.9;
    double mix_mu1 = 1.0, mix_s21 = 2.0;
    double mix_mu2 = 7.0, mix_s22 = 2.0;
    GkTableSummaries gk_table = GkTableSummaries::analytic;

    // prop1: b(theta) = (theta, theta), b0 = (b0_bar, -b0_bar)
    double b0_bar = 2.0;

    int k_theta() const { return kind == ScenarioKind::gk_mixture ? 4 : 1; }
    int k_eta() const {
        switch (kind) {
            case ScenarioKind::gk_mixture: return 7;
            case ScenarioKind::prop1: return 2;
            default: return 2;
        }
    }
    SummaryKind summary_kind() const {
        switch (kind) {
            case ScenarioKind::gk_mixture: return SummaryKind::octiles;
            case ScenarioKind::prop1: return SummaryKind::prop1_pair;
            default: return SummaryKind::mean_var;
        }
    }
    std::string id() const;

    void validate() const;

    static Scenario normal_scenario(double sigma2, int n = 100);
    static Scenario gk_scenario(int n = 100);
    static Scenario prop1_scenario(double b0_bar = 2.0, int n = 100);
};

Scenario scenario_from_id(const std::string& id);

// g-and-k quantile function. b >= 0, k > -0.5 keep it monotone in q.
double gk_quantile(double q, const ThetaVec& theta);

// Population scale profile for the prop1 scenario: a bump of height 3
// at theta = b0_bar/2 on a baseline of 1, width 0.2*b0_bar.
double prop1_scale(double theta, double b0_bar);

// One synthetic summary (theta,theta) + (scale/sqrt(n)) * Z, Z bivariate
// standard normal.
SummaryVec prop1_summary(double theta, int n, double b0_bar, RngStream& rng);

// Simulates one dataset of length scenario.n. For prop1 the "dataset"
// is the synthetic summary pair itself.
std::vector<double> simulate(const Scenario& sc, const ThetaVec& theta,
                             Which which, RngStream& rng);

SummaryVec summary_mean_var(const std::vector<double>& data);
SummaryVec summary_octiles(const std::vector<double>& data);

// Scenario-appropriate summary of a dataset produced by simulate().
SummaryVec summarize(const Scenario& sc, const std::vector<double>& data);

ThetaVec prior_sample(const Scenario& sc, RngStream& rng);

// Summary the reference table stores for a prior draw. Equals
// summarize(simulate(assumed)) except in the gk analytic mode, where it
// is the quantile septet of the g-and-k law at theta.
SummaryVec table_summary(const Scenario& sc, const ThetaVec& theta, RngStream& rng);

// Observed-side data and summary under the scenario's true DGP.
std::vector<double> simulate_observed(const Scenario& sc, RngStream& rng);
SummaryVec observed_summary(const Scenario& sc, RngStream& rng);

} // namespace abcms
