#include "abcms/pseudo_true.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "abcms/errors.hpp"
#include "abcms/parallel.hpp"
#include "abcms/rng.hpp"

namespace abcms {

SummaryVec binding_normal(double theta) { return {theta, 1.0}; }

SummaryVec b0_normal(double theta0, double sigma2) {
    if (!(sigma2 > 0.0)) throw std::domain_error("b0_normal: sigma2 must be > 0");
    return {theta0, sigma2};
}

SummaryVec binding_gk(const ThetaVec& theta) {
    SummaryVec out(7);
    for (int j = 1; j <= 7; ++j)
        out[static_cast<std::size_t>(j - 1)] = gk_quantile(j / 8.0, theta);
    return out;
}

SummaryVec b0_mixture(double w, double mu1, double s21, double mu2, double s22) {
    if (!(w >= 0.0 && w <= 1.0) || !(s21 > 0.0) || !(s22 > 0.0))
        throw std::domain_error("b0_mixture: invalid mixture parameters");
    const double sd1 = std::sqrt(s21), sd2 = std::sqrt(s22);
    const double sdmax = std::max(sd1, sd2);
    const double lo0 = std::min(mu1, mu2) - 10.0 * sdmax;
    const double hi0 = std::max(mu1, mu2) + 10.0 * sdmax;
    auto cdf = [&](double x) {
        return w * normal_cdf((x - mu1) / sd1) + (1.0 - w) * normal_cdf((x - mu2) / sd2);
    };
    SummaryVec out(7);
    for (int j = 1; j <= 7; ++j) {
        const double p = j / 8.0;
        double lo = lo0, hi = hi0;
        if (cdf(lo) > p || cdf(hi) < p)
            throw numeric_error("b0_mixture: bracket does not contain the quantile");
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (cdf(mid) < p)
                lo = mid;
            else
                hi = mid;
        }
        out[static_cast<std::size_t>(j - 1)] = 0.5 * (lo + hi);
    }
    return out;
}

LimitMaps limit_maps_normal(double theta0, double sigma2) {
    LimitMaps m;
    m.binding = [](const ThetaVec& t) { return binding_normal(t.at(0)); };
    m.b0 = b0_normal(theta0, sigma2);
    m.box = {{-100.0, 100.0}};
    return m;
}

LimitMaps limit_maps_gk_mixture(double w, double mu1, double s21, double mu2,
                                double s22) {
    LimitMaps m;
    m.binding = [](const ThetaVec& t) { return binding_gk(t); };
    m.b0 = b0_mixture(w, mu1, s21, mu2, s22);
    m.box = {{0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}, {0.0, 10.0}};
    return m;
}

namespace {

double objective(const LimitMaps& maps, const ThetaVec& theta) {
    const SummaryVec b = maps.binding(theta);
    double ss = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double d = maps.b0[j] - b[j];
        ss += d * d;
    }
    return std::sqrt(ss);
}

double penalized(const LimitMaps& maps, const ThetaVec& theta) {
    double pen = 0.0;
    ThetaVec clamped = theta;
    for (std::size_t j = 0; j < theta.size(); ++j) {
        const auto [lo, hi] = maps.box[j];
        if (theta[j] < lo) {
            pen += (lo - theta[j]) * (lo - theta[j]);
            clamped[j] = lo;
        } else if (theta[j] > hi) {
            pen += (theta[j] - hi) * (theta[j] - hi);
            clamped[j] = hi;
        }
    }
    return objective(maps, clamped) + 1e4 * pen;
}

struct SimplexResult {
    ThetaVec x;
    double f = 0.0;
    long iterations = 0;
    bool converged = false;
};

// Nelder-Mead with standard coefficients: reflection 1, expansion 2,
// contraction 0.5, shrink 0.5. Converges when the simplex diameter
// drops below tol.
SimplexResult nelder_mead(const std::function<double(const ThetaVec&)>& f,
                          const ThetaVec& x0, double step, double tol,
                          long max_iter) {
    const std::size_t d = x0.size();
    std::vector<ThetaVec> verts(d + 1, x0);
    std::vector<double> fv(d + 1);
    for (std::size_t j = 0; j < d; ++j) verts[j + 1][j] += step;
    for (std::size_t v = 0; v <= d; ++v) fv[v] = f(verts[v]);

    SimplexResult res;
    for (long it = 0; it < max_iter; ++it) {
        // order vertices
        std::vector<std::size_t> ord(d + 1);
        for (std::size_t v = 0; v <= d; ++v) ord[v] = v;
        std::stable_sort(ord.begin(), ord.end(),
                         [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = ord[0], worst = ord[d], second = ord[d - 1];

        double diam = 0.0;
        for (std::size_t v = 0; v <= d; ++v) {
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double dd = verts[v][j] - verts[best][j];
                dist += dd * dd;
            }
            diam = std::max(diam, std::sqrt(dist));
        }
        if (diam < tol) {
            res.converged = true;
            res.iterations = it;
            res.x = verts[best];
            res.f = fv[best];
            return res;
        }

        ThetaVec centroid(d, 0.0);
        for (std::size_t v = 0; v <= d; ++v) {
            if (v == worst) continue;
            for (std::size_t j = 0; j < d; ++j) centroid[j] += verts[v][j];
        }
        for (std::size_t j = 0; j < d; ++j) centroid[j] /= static_cast<double>(d);

        auto point = [&](double coef) {
            ThetaVec p(d);
            for (std::size_t j = 0; j < d; ++j)
                p[j] = centroid[j] + coef * (centroid[j] - verts[worst][j]);
            return p;
        };

        const ThetaVec xr = point(1.0);
        const double fr = f(xr);
        if (fr < fv[best]) {
            const ThetaVec xe = point(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                verts[worst] = xe;
                fv[worst] = fe;
            } else {
                verts[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            verts[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const ThetaVec xc = point(outside ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < (outside ? fr : fv[worst])) {
                verts[worst] = xc;
                fv[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t v = 0; v <= d; ++v) {
                    if (v == best) continue;
                    for (std::size_t j = 0; j < d; ++j)
                        verts[v][j] =
                            verts[best][j] + 0.5 * (verts[v][j] - verts[best][j]);
                    fv[v] = f(verts[v]);
                }
            }
        }
        res.iterations = it + 1;
    }
    // best effort on iteration cap
    std::size_t best = 0;
    for (std::size_t v = 1; v <= d; ++v)
        if (fv[v] < fv[best]) best = v;
    res.x = verts[best];
    res.f = fv[best];
    res.converged = false;
    return res;
}

// Halton sequence in the box, scrambled by a random shift per dimension.
ThetaVec halton_point(int index, const std::vector<std::pair<double, double>>& box,
                      const std::vector<double>& shift) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    ThetaVec p(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) {
        const int base = primes[j % 8];
        double f = 1.0, r = 0.0;
        int i = index + 1;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        r += shift[j];
        r -= std::floor(r);
        p[j] = box[j].first + r * (box[j].second - box[j].first);
    }
    return p;
}

} // namespace

PseudoTrueResult solve_pseudo_true(const LimitMaps& maps, int restarts,
                                   std::uint64_t seed, int threads) {
    if (restarts < 1)
        throw std::domain_error("solve_pseudo_true: restarts must be >= 1");
    if (!maps.binding) throw config_error("solve_pseudo_true: missing binding map");

    RngStream shift_rng = RngStream::from(seed, 0x5d17ULL);
    std::vector<double> shift(maps.box.size());
    for (auto& s : shift) s = shift_rng.uniform();

    std::vector<RestartTrace> traces(static_cast<std::size_t>(restarts));
    parallel_for(static_cast<std::size_t>(restarts), threads, [&](std::size_t r) {
        const ThetaVec x0 = halton_point(static_cast<int>(r), maps.box, shift);
        double step = 0.0;
        for (const auto& [lo, hi] : maps.box) step = std::max(step, 0.05 * (hi - lo));
        const auto sol = nelder_mead(
            [&](const ThetaVec& t) { return penalized(maps, t); }, x0, step, 1e-8,
            20000);
        RestartTrace tr;
        tr.restart = static_cast<int>(r);
        tr.objective = sol.f;
        tr.iterations = sol.iterations;
        tr.converged = sol.converged;
        tr.argmin = sol.x;
        traces[r] = tr;
    });

    // deterministic reduction: smallest objective among converged,
    // in-box restarts; ties by restart index
    int best = -1;
    for (int r = 0; r < restarts; ++r) {
        const auto& tr = traces[static_cast<std::size_t>(r)];
        if (!tr.converged) continue;
        bool inside = true;
        for (std::size_t j = 0; j < maps.box.size(); ++j)
            if (tr.argmin[j] < maps.box[j].first - 1e-6 ||
                tr.argmin[j] > maps.box[j].second + 1e-6)
                inside = false;
        if (!inside) continue;
        if (best < 0 || tr.objective < traces[static_cast<std::size_t>(best)].objective)
            best = r;
    }
    if (best < 0)
        throw non_convergence_error("solve_pseudo_true: no restart converged in box");

    PseudoTrueResult out;
    out.theta_star = traces[static_cast<std::size_t>(best)].argmin;
    // clamp sub-tolerance excursions so the reported point lies in the box
    for (std::size_t j = 0; j < maps.box.size(); ++j)
        out.theta_star[j] =
            std::clamp(out.theta_star[j], maps.box[j].first, maps.box[j].second);
    out.eps_star = objective(maps, out.theta_star);
    out.trace = std::move(traces);
    return out;
}

RegPseudoTrue reg_pseudo_true(const ThetaVec& theta_star,
                              const std::vector<double>& beta0,
                              const LimitMaps& maps) {
    const std::size_t kt = theta_star.size();
    const std::size_t ke = maps.b0.size();
    if (beta0.size() != kt * ke)
        throw dimension_mismatch_error("reg_pseudo_true: beta0 must be k_theta*k_eta");
    const SummaryVec b = maps.binding(theta_star);
    RegPseudoTrue out;
    out.value = theta_star;
    for (std::size_t c = 0; c < kt; ++c) {
        double shift = 0.0;
        for (std::size_t j = 0; j < ke; ++j)
            shift += beta0[c * ke + j] * (b[j] - maps.b0[j]);
        out.value[c] -= shift;
    }
    for (std::size_t c = 0; c < kt; ++c)
        if (out.value[c] < maps.box[c].first || out.value[c] > maps.box[c].second)
            out.inside_box = false;
    return out;
}

} // namespace abcms
