#include "abcms/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "abcms/errors.hpp"
#include "abcms/parallel.hpp"
#include "abcms/regression.hpp"

namespace abcms {

AcceptCurve accept_curve(const DistanceVec& d, int J, double q_lo, double q_hi,
                         int k_theta) {
    if (J < 2) throw std::domain_error("accept_curve: J must be >= 2");
    if (!(q_lo > 0.0 && q_lo < q_hi && q_hi <= 1.0))
        throw std::domain_error("accept_curve: need 0 < q_lo < q_hi <= 1");
    const std::size_t N = d.d.size();
    if (N == 0) throw empty_posterior_error("accept_curve: no distances");

    std::vector<double> sorted(d.d);
    std::sort(sorted.begin(), sorted.end());
    const double e_lo = quantile_tolerance(d, q_lo).epsilon;
    const double e_hi = quantile_tolerance(d, q_hi).epsilon;
    if (!(e_hi > e_lo))
        throw degenerate_curve_error("accept_curve: degenerate distance spread");

    AcceptCurve c;
    c.k_theta = k_theta;
    c.eps.resize(static_cast<std::size_t>(J));
    c.alpha_hat.resize(static_cast<std::size_t>(J));
    c.alpha_ref.resize(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        const double e =
            e_lo + (e_hi - e_lo) * static_cast<double>(j) / static_cast<double>(J - 1);
        c.eps[static_cast<std::size_t>(j)] = e;
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), e);
        c.alpha_hat[static_cast<std::size_t>(j)] =
            static_cast<double>(it - sorted.begin()) / static_cast<double>(N);
    }
    // reference: linear in eps^k_theta through the endpoint pairs
    const double x0 = std::pow(e_lo, k_theta);
    const double x1 = std::pow(e_hi, k_theta);
    const double a0 = c.alpha_hat.front();
    const double a1 = c.alpha_hat.back();
    double dev = 0.0;
    for (int j = 0; j < J; ++j) {
        const double x = std::pow(c.eps[static_cast<std::size_t>(j)], k_theta);
        c.alpha_ref[static_cast<std::size_t>(j)] =
            a0 + (a1 - a0) * (x - x0) / (x1 - x0);
        dev += std::abs(c.alpha_hat[static_cast<std::size_t>(j)] -
                        c.alpha_ref[static_cast<std::size_t>(j)]);
    }
    c.score = dev / static_cast<double>(J) / q_hi;
    return c;
}

std::vector<AcceptCurve> accept_curve_benchmark(const ReferenceTable& table,
                                                std::span<const std::size_t> rows,
                                                int J, double q_lo, double q_hi,
                                                int k_theta) {
    std::vector<AcceptCurve> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= table.rows())
            throw std::out_of_range("accept_curve_benchmark: row index out of range");
        const auto pseudo = table.eta_row(r);
        DistanceVec dv;
        dv.d.reserve(table.rows() - 1);
        for (std::size_t i = 0; i < table.rows(); ++i) {
            if (i == r) continue;
            const auto row = table.eta_row(i);
            double ss = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                const double diff = row[j] - pseudo[j];
                ss += diff * diff;
            }
            dv.d.push_back(std::sqrt(ss));
        }
        out.push_back(accept_curve(dv, J, q_lo, q_hi, k_theta));
    }
    return out;
}

HSpec HSpec::from_name(const std::string& name) {
    HSpec h;
    if (name == "identity" || name == "theta") {
        h.kind = HKind::identity;
    } else if (name == "square-cube" || name == "sqcube") {
        h.kind = HKind::square_cube;
    } else {
        throw config_error("unknown h function: " + name);
    }
    return h;
}

std::string HSpec::name() const {
    switch (kind) {
        case HKind::identity: return "identity";
        case HKind::square_cube: return "square-cube";
        case HKind::custom: return "custom";
    }
    return "?";
}

std::vector<double> HSpec::eval(std::span<const double> theta) const {
    std::vector<double> out;
    switch (kind) {
        case HKind::identity:
            out.assign(theta.begin(), theta.end());
            return out;
        case HKind::square_cube:
            out.reserve(2 * theta.size());
            for (double t : theta) {
                out.push_back(t * t);
                out.push_back(t * t * t);
            }
            return out;
        case HKind::custom:
            out.reserve(powers.size() * theta.size());
            for (double t : theta)
                for (int p : powers) out.push_back(std::pow(t, p));
            return out;
    }
    throw config_error("HSpec::eval: bad kind");
}

namespace {

std::vector<double> posterior_h_mean(const PosteriorDraws& p, const HSpec& h,
                                     bool weighted) {
    p.validate();
    std::vector<double> acc;
    double wsum = 0.0;
    std::vector<double> th(static_cast<std::size_t>(p.k_theta));
    for (std::size_t i = 0; i < p.count(); ++i) {
        for (int c = 0; c < p.k_theta; ++c)
            th[static_cast<std::size_t>(c)] = p.draw(i, c);
        const auto hv = h.eval(th);
        if (acc.empty()) acc.assign(hv.size(), 0.0);
        const double w = weighted ? p.weights[i] : 1.0;
        for (std::size_t j = 0; j < hv.size(); ++j) acc[j] += w * hv[j];
        wsum += w;
    }
    for (auto& v : acc) v /= wsum;
    return acc;
}

} // namespace

double reg_discrepancy_statistic(const PosteriorDraws& p_ar,
                                 const PosteriorDraws& p_reg, const HSpec& h, int n,
                                 bool force_unweighted) {
    if (p_ar.k_theta != p_reg.k_theta)
        throw dimension_mismatch_error("reg_discrepancy_statistic: k_theta mismatch");
    const bool w_ar = !force_unweighted && default_weighted(p_ar.tag);
    const bool w_reg = !force_unweighted && default_weighted(p_reg.tag);
    const auto h_ar = posterior_h_mean(p_ar, h, w_ar);
    const auto h_reg = posterior_h_mean(p_reg, h, w_reg);
    double ss = 0.0;
    for (std::size_t j = 0; j < h_ar.size(); ++j) {
        const double d = h_ar[j] - h_reg[j];
        ss += d * d;
    }
    return std::sqrt(static_cast<double>(n)) * std::sqrt(ss);
}

double calibrate_cutoff(const Scenario& sc, const ThetaVec& theta_cal,
                        const CutoffConfig& cfg, const HSpec& h,
                        std::uint64_t master_seed, std::vector<double>* statistics) {
    if (cfg.B < 2) throw std::domain_error("calibrate_cutoff: B must be >= 2");
    if (!(cfg.level > 0.0 && cfg.level <= 1.0))
        throw std::domain_error("calibrate_cutoff: level must be in (0,1]");

    std::vector<double> T(static_cast<std::size_t>(cfg.B));
    parallel_for(static_cast<std::size_t>(cfg.B), cfg.threads, [&](std::size_t b) {
        RngStream rep = RngStream::from(master_seed, 0xca11 + b);
        RngStream obs_rng = rep.derive(1);
        try {
            const auto data = simulate(sc, theta_cal, Which::assumed, obs_rng);
            const auto eta_obs = summarize(sc, data);
            const auto table =
                generate_table(sc, cfg.N, rep.derive(2).key(), 1);
            const auto d = compute_distances(table, eta_obs);
            const auto tol = quantile_tolerance(d, cfg.q);
            const auto ar = accept(table, d, tol);
            const auto fit = fit_local_linear(ar, table, eta_obs);
            const auto reg = adjust_linear(ar, table, fit);
            T[b] = reg_discrepancy_statistic(ar, reg, h, sc.n);
        } catch (const std::exception& e) {
            throw empty_posterior_error("calibrate_cutoff: replication " +
                                        std::to_string(b) + ": " + e.what());
        }
    });
    if (statistics) *statistics = T;
    std::sort(T.begin(), T.end());
    std::size_t k = static_cast<std::size_t>(
        std::ceil(cfg.level * static_cast<double>(cfg.B) - 1e-9));
    if (k < 1) k = 1;
    if (k > T.size()) k = T.size();
    return T[k - 1];
}

} // namespace abcms
