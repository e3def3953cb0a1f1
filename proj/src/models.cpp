#include "abcms/models.hpp"

#include <algorithm>
#include <cmath>

#include "abcms/errors.hpp"

namespace abcms {

std::string Scenario::id() const {
    switch (kind) {
        case ScenarioKind::normal: return "normal";
        case ScenarioKind::gk_mixture: return "gk-mixture";
        case ScenarioKind::prop1: return "prop1";
    }
    return "unknown";
}

void Scenario::validate() const {
    if (n < 2) throw config_error("scenario: n must be >= 2");
    switch (kind) {
        case ScenarioKind::normal:
            if (!(sigma2 > 0.0)) throw config_error("scenario: sigma2 must be > 0");
            break;
        case ScenarioKind::gk_mixture:
            if (!(mix_w >= 0.0 && mix_w <= 1.0))
                throw config_error("scenario: mixture weight must be in [0,1]");
            if (!(mix_s21 > 0.0 && mix_s22 > 0.0))
                throw config_error("scenario: mixture variances must be > 0");
            break;
        case ScenarioKind::prop1:
            if (b0_bar == 0.0) throw config_error("scenario: b0_bar must be nonzero");
            break;
    }
}

Scenario Scenario::normal_scenario(double sigma2, int n) {
    Scenario s;
    s.kind = ScenarioKind::normal;
    s.sigma2 = sigma2;
    s.n = n;
    s.validate();
    return s;
}

Scenario Scenario::gk_scenario(int n) {
    Scenario s;
    s.kind = ScenarioKind::gk_mixture;
    s.n = n;
    s.validate();
    return s;
}

Scenario Scenario::prop1_scenario(double b0_bar, int n) {
    Scenario s;
    s.kind = ScenarioKind::prop1;
    s.b0_bar = b0_bar;
    s.n = n;
    s.validate();
    return s;
}

Scenario scenario_from_id(const std::string& id) {
    if (id == "normal") return Scenario::normal_scenario(1.0);
    if (id == "gk-mixture") return Scenario::gk_scenario();
    if (id == "prop1") return Scenario::prop1_scenario();
    throw config_error("unknown scenario id: " + id);
}

double gk_quantile(double q, const ThetaVec& theta) {
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("gk_quantile: q must be in (0,1)");
    if (theta.size() != 4)
        throw dimension_mismatch_error("gk_quantile: theta must have 4 components");
    const double a = theta[0], b = theta[1], g = theta[2], k = theta[3];
    const double z = normal_quantile(q);
    // 1 + 0.8*(1-e^{-gz})/(1+e^{-gz}) = 1 + 0.8*tanh(gz/2)
    const double skew = 1.0 + 0.8 * std::tanh(0.5 * g * z);
    return a + b * skew * std::pow(1.0 + z * z, k) * z;
}

double prop1_scale(double theta, double b0_bar) {
    const double u = (theta - 0.5 * b0_bar) / (0.2 * b0_bar);
    return 1.0 + 2.0 * std::exp(-u * u);
}

SummaryVec prop1_summary(double theta, int n, double b0_bar, RngStream& rng) {
    if (b0_bar == 0.0)
        throw config_error("prop1_summary: b0_bar must be nonzero");
    if (n < 1) throw config_error("prop1_summary: n must be >= 1");
    const double s = prop1_scale(theta, b0_bar) / std::sqrt(static_cast<double>(n));
    return {theta + s * rng.normal(), theta + s * rng.normal()};
}

std::vector<double> simulate(const Scenario& sc, const ThetaVec& theta,
                             Which which, RngStream& rng) {
    sc.validate();
    switch (sc.kind) {
        case ScenarioKind::normal: {
            std::vector<double> z(static_cast<std::size_t>(sc.n));
            if (which == Which::assumed) {
                const double mu = theta.at(0);
                for (auto& v : z) v = mu + rng.normal();
            } else {
                const double sd = std::sqrt(sc.sigma2);
                for (auto& v : z) v = sc.theta0 + sd * rng.normal();
            }
            return z;
        }
        case ScenarioKind::gk_mixture: {
            std::vector<double> z(static_cast<std::size_t>(sc.n));
            if (which == Which::assumed) {
                for (auto& v : z) v = gk_quantile(rng.uniform(), theta);
            } else {
                const double sd1 = std::sqrt(sc.mix_s21);
                const double sd2 = std::sqrt(sc.mix_s22);
                for (auto& v : z) {
                    if (rng.uniform() < sc.mix_w)
                        v = sc.mix_mu1 + sd1 * rng.normal();
                    else
                        v = sc.mix_mu2 + sd2 * rng.normal();
                }
            }
            return z;
        }
        case ScenarioKind::prop1: {
            if (which == Which::assumed)
                return prop1_summary(theta.at(0), sc.n, sc.b0_bar, rng);
            // true DGP: summary concentrates at (b0_bar, -b0_bar), unit scale
            const double s = 1.0 / std::sqrt(static_cast<double>(sc.n));
            return {sc.b0_bar + s * rng.normal(), -sc.b0_bar + s * rng.normal()};
        }
    }
    throw config_error("simulate: bad scenario kind");
}

SummaryVec summary_mean_var(const std::vector<double>& data) {
    const std::size_t n = data.size();
    if (n < 2)
        throw insufficient_data_error("summary_mean_var: need at least 2 points");
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : data) ss += (v - mean) * (v - mean);
    return {mean, ss / static_cast<double>(n - 1)};
}

SummaryVec summary_octiles(const std::vector<double>& data) {
    const std::size_t n = data.size();
    if (n < 8)
        throw insufficient_data_error("summary_octiles: need at least 8 points");
    std::vector<double> sorted(data);
    std::sort(sorted.begin(), sorted.end());
    SummaryVec out(7);
    for (int j = 1; j <= 7; ++j) {
        // order-statistic position 1 + (n-1)p, linear interpolation
        const double pos = (static_cast<double>(n) - 1.0) * (j / 8.0);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(lo);
        const std::size_t hi = std::min(lo + 1, n - 1);
        out[static_cast<std::size_t>(j - 1)] =
            sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    }
    return out;
}

SummaryVec summarize(const Scenario& sc, const std::vector<double>& data) {
    switch (sc.summary_kind()) {
        case SummaryKind::mean_var: return summary_mean_var(data);
        case SummaryKind::octiles: return summary_octiles(data);
        case SummaryKind::prop1_pair: return data;  // already a summary pair
    }
    throw config_error("summarize: bad summary kind");
}

ThetaVec prior_sample(const Scenario& sc, RngStream& rng) {
    switch (sc.kind) {
        case ScenarioKind::normal:
            return {5.0 * rng.normal()};  // N(0, 25)
        case ScenarioKind::gk_mixture: {
            ThetaVec t(4);
            for (auto& v : t) v = rng.uniform(0.0, 10.0);
            return t;
        }
        case ScenarioKind::prop1: {
            const double half = std::abs(sc.b0_bar);
            return {rng.uniform(-half, half)};
        }
    }
    throw config_error("prior_sample: bad scenario kind");
}

SummaryVec table_summary(const Scenario& sc, const ThetaVec& theta, RngStream& rng) {
    if (sc.kind == ScenarioKind::gk_mixture &&
        sc.gk_table == GkTableSummaries::analytic) {
        SummaryVec out(7);
        for (int j = 1; j <= 7; ++j)
            out[static_cast<std::size_t>(j - 1)] = gk_quantile(j / 8.0, theta);
        return out;
    }
    const auto data = simulate(sc, theta, Which::assumed, rng);
    return summarize(sc, data);
}

std::vector<double> simulate_observed(const Scenario& sc, RngStream& rng) {
    return simulate(sc, ThetaVec(static_cast<std::size_t>(sc.k_theta()), 0.0),
                    Which::true_dgp, rng);
}

SummaryVec observed_summary(const Scenario& sc, RngStream& rng) {
    return summarize(sc, simulate_observed(sc, rng));
}

} // namespace abcms
