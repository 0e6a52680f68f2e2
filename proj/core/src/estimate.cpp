#include "vinemeta/estimate.hpp"

#include "vinemeta/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace vinemeta {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kHuge = 1e100;

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sup_norm(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

struct Objective {
    std::function<double(const Vec&)> f;
    int n_eval = 0;

    double operator()(const Vec& x) {
        ++n_eval;
        try {
            double v = f(x);
            return std::isfinite(v) ? v : kHuge;
        } catch (const std::exception&) {
            return kHuge;
        }
    }
    Vec gradient(const Vec& x) {
        Vec g(x.size());
        Vec xp = x;
        for (std::size_t j = 0; j < x.size(); ++j) {
            double h = 1e-5 * std::max(1.0, std::fabs(x[j]));
            xp[j] = x[j] + h;
            double fp = (*this)(xp);
            xp[j] = x[j] - h;
            double fm = (*this)(xp);
            xp[j] = x[j];
            g[j] = (fp - fm) / (2.0 * h);
        }
        return g;
    }
};

struct BfgsOutcome {
    Vec x;
    double f = kHuge;
    Vec grad;
    int iterations = 0;
    bool converged = false;
};

/// One trial point along a search direction.
struct LinePoint {
    double a = 0.0;   // step length
    double f = kHuge; // objective value
    double df = 0.0;  // directional derivative, valid when has_g
    Vec x, g;
    bool has_g = false;
};

BfgsOutcome bfgs_minimize(Objective& obj, Vec x, const FitOptions& opt) {
    const std::size_t n = x.size();
    BfgsOutcome out;
    double f = obj(x);
    Vec g = obj.gradient(x);
    std::vector<Vec> H(n, Vec(n, 0.0));  // inverse-Hessian approximation
    for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;
    bool h_fresh = true;  // identity not yet curvature-scaled
    int stall = 0;        // consecutive near-zero improvements
    // Numerical-stationarity fallback: once no descent direction yields a
    // resolvable decrease, the iterate is a minimum at working precision.
    // The achievable gradient floor grows with the objective scale and the
    // local curvature, so the acceptance threshold scales with |f|.
    auto at_floor = [](const Vec& grad, double fval) {
        return sup_norm(grad) <= 1e-4 * std::max(1.0, std::fabs(fval));
    };

    // Strong-Wolfe line search (sufficient decrease + curvature condition),
    // bracketing with bisection refinement. A poor step here breaks the
    // curvature condition and degrades the quasi-Newton metric, which is why
    // plain backtracking is not enough on ill-conditioned problems.
    const double c1 = 1e-4, c2 = 0.9;
    auto eval_at = [&](double a, const Vec& d) {
        LinePoint p;
        p.a = a;
        p.x.resize(n);
        for (std::size_t i = 0; i < n; ++i) p.x[i] = x[i] + a * d[i];
        p.f = obj(p.x);
        return p;
    };
    auto add_grad = [&](LinePoint& p, const Vec& d) {
        if (p.has_g) return;
        p.g = obj.gradient(p.x);
        p.df = dot(p.g, d);
        p.has_g = true;
    };
    auto wolfe_search = [&](const Vec& d, double slope, LinePoint& best) {
        auto zoom = [&](LinePoint lo, LinePoint hi) {
            for (int z = 0; z < 30; ++z) {
                if (std::fabs(hi.a - lo.a) < 1e-14 * std::max(1.0, lo.a)) break;
                LinePoint p = eval_at(0.5 * (lo.a + hi.a), d);
                if (p.f > f + c1 * p.a * slope || p.f >= lo.f) {
                    hi = std::move(p);
                    continue;
                }
                add_grad(p, d);
                if (std::fabs(p.df) <= -c2 * slope) {
                    best = std::move(p);
                    return true;
                }
                if (p.df * (hi.a - lo.a) >= 0.0) hi = lo;
                lo = std::move(p);
            }
            if (lo.a > 0.0 && lo.f < f) {  // decrease without full curvature
                best = std::move(lo);
                return true;
            }
            return false;
        };
        LinePoint prev;  // step 0: current iterate
        prev.f = f;
        for (int i = 0; i < 12; ++i) {
            LinePoint p = eval_at(i == 0 ? 1.0 : prev.a * 2.0, d);
            if (p.f > f + c1 * p.a * slope || (i > 0 && p.f >= prev.f))
                return zoom(std::move(prev), std::move(p));
            add_grad(p, d);
            if (std::fabs(p.df) <= -c2 * slope) {
                best = std::move(p);
                return true;
            }
            if (p.df >= 0.0) return zoom(std::move(p), std::move(prev));
            prev = std::move(p);
        }
        if (prev.a > 0.0 && prev.f < f) {
            best = std::move(prev);
            return true;
        }
        return false;
    };

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        out.iterations = iter;
        if (sup_norm(g) < opt.grad_tol) {
            out.converged = true;
            break;
        }
        Vec d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = -dot(H[i], g);
        double slope = dot(d, g);
        bool steepest = false;
        auto reset_to_steepest = [&] {
            for (std::size_t i = 0; i < n; ++i) {
                std::fill(H[i].begin(), H[i].end(), 0.0);
                H[i][i] = 1.0;
                d[i] = -g[i];
            }
            slope = dot(d, g);
            h_fresh = true;
            steepest = true;
        };
        if (!(slope < 0.0)) reset_to_steepest();
        LinePoint step;
        bool got = wolfe_search(d, slope, step);
        if (!got && !steepest) {  // quasi-Newton direction exhausted: try -g
            reset_to_steepest();
            got = wolfe_search(d, slope, step);
        }
        if (!got) {
            out.converged = at_floor(g, f);
            break;
        }
        add_grad(step, d);
        Vec s(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = step.x[i] - x[i];
            yv[i] = step.g[i] - g[i];
        }
        double sy = dot(s, yv);
        bool small_change =
            std::fabs(f - step.f) <= opt.rel_tol * (1.0 + std::fabs(step.f));
        x = std::move(step.x);
        f = step.f;
        g = std::move(step.g);
        if (small_change) {
            if (++stall >= 3) {
                out.converged = at_floor(g, f);
                ++out.iterations;
                break;
            }
        } else {
            stall = 0;
        }
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv))) {
            if (h_fresh) {
                // standard first-step curvature scaling of the identity
                double yy = dot(yv, yv);
                if (yy > 0.0)
                    for (std::size_t i = 0; i < n; ++i) H[i][i] = sy / yy;
                h_fresh = false;
            }
            // H <- (I - s y'/sy) H (I - y s'/sy) + s s'/sy
            Vec Hy(n);
            for (std::size_t i = 0; i < n; ++i) Hy[i] = dot(H[i], yv);
            double yHy = dot(yv, Hy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i][j] += ((sy + yHy) * s[i] * s[j] / sy -
                                Hy[i] * s[j] - s[i] * Hy[j]) /
                               sy;
        }
    }
    out.x = std::move(x);
    out.f = f;
    out.grad = std::move(g);
    return out;
}

/// In-place inversion by Gauss-Jordan with partial pivoting; false when
/// numerically singular.
bool invert(std::vector<Vec>& a) {
    const std::size_t n = a.size();
    std::vector<Vec> inv(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double m = a[r][col];
            if (m == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= m * a[col][j];
                inv[r][j] -= m * inv[col][j];
            }
        }
    }
    a = std::move(inv);
    return true;
}

double logit(double p) { return std::log(p / (1.0 - p)); }
double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Reported quantities for the delta method: the six cell means, six
/// variability parameters, five taus, four derived accuracy probabilities.
Vec report_vector(const ModelParams& p) {
    Vec r;
    r.reserve(21);
    for (int j = 0; j < 3; ++j) r.push_back(p.pi1[j]);
    for (int j = 0; j < 3; ++j) r.push_back(p.pi0[j]);
    for (int j = 0; j < 3; ++j) r.push_back(p.disp1[j]);
    for (int j = 0; j < 3; ++j) r.push_back(p.disp0[j]);
    for (int k = 0; k < 5; ++k) r.push_back(p.taus[k]);
    for (double v : derived_accuracy(p)) r.push_back(v);
    return r;
}

}  // namespace

ParamPacker::ParamPacker(const ModelParams& shape, double tau_cap)
    : shape_(shape) {
    dim_ = 12;
    for (int k = 0; k < 5; ++k) {
        if (shape.boundary[k] != 0) continue;
        auto [lo, hi] = shape.families[k].tau_span();
        lo = std::max(lo, -tau_cap);
        hi = std::min(hi, tau_cap);
        if (hi - lo < 1e-9) continue;  // independence-only edge
        edges_[k] = {dim_++, lo, hi};
    }
}

std::vector<double> ParamPacker::pack(const ModelParams& p) const {
    Vec x(dim_);
    auto x1 = mlogit(p.pi1), x0 = mlogit(p.pi0);
    for (int j = 0; j < 3; ++j) {
        x[j] = x1[j];
        x[3 + j] = x0[j];
        if (p.margins == MarginFamily::Normal) {
            x[6 + j] = std::log(p.disp1[j]);
            x[9 + j] = std::log(p.disp0[j]);
        } else {
            x[6 + j] = logit(p.disp1[j]);
            x[9 + j] = logit(p.disp0[j]);
        }
    }
    for (int k = 0; k < 5; ++k) {
        if (edges_[k].idx < 0) continue;
        double c = 0.5 * (edges_[k].lo + edges_[k].hi);
        double h = 0.5 * (edges_[k].hi - edges_[k].lo);
        double t = std::clamp((p.taus[k] - c) / h, -1.0 + 1e-12, 1.0 - 1e-12);
        x[edges_[k].idx] = std::atanh(t);
    }
    return x;
}

ModelParams ParamPacker::unpack(const std::vector<double>& x) const {
    ModelParams p = shape_;
    p.pi1 = mlogit_inv({x[0], x[1], x[2]});
    p.pi0 = mlogit_inv({x[3], x[4], x[5]});
    for (int j = 0; j < 3; ++j) {
        if (p.margins == MarginFamily::Normal) {
            p.disp1[j] = std::exp(x[6 + j]);
            p.disp0[j] = std::exp(x[9 + j]);
        } else {
            p.disp1[j] = expit(x[6 + j]);
            p.disp0[j] = expit(x[9 + j]);
        }
    }
    for (int k = 0; k < 5; ++k) {
        if (edges_[k].idx < 0) continue;
        double c = 0.5 * (edges_[k].lo + edges_[k].hi);
        double h = 0.5 * (edges_[k].hi - edges_[k].lo);
        p.taus[k] = c + h * std::tanh(x[edges_[k].idx]);
    }
    return p;
}

ModelParams initial_params(const std::vector<StudyTable>& data,
                           MarginFamily margins, const FamilyChoice& family,
                           const LabelOrder& order) {
    ModelParams p = default_params(margins, family, order);
    std::array<long long, 4> tot1{}, tot0{};
    for (const StudyTable& st : data)
        for (int c = 0; c < 4; ++c) {
            tot1[c] += st.diseased[c];
            tot0[c] += st.non_diseased[c];
        }
    auto pooled = [](const std::array<long long, 4>& t) {
        double n = static_cast<double>(t[0] + t[1] + t[2] + t[3]);
        ProbTriplet p{};
        if (n <= 0.0) return ProbTriplet{0.1, 0.1, 0.2};
        // light shrinkage keeps empty cells off the simplex boundary
        p.p10 = (t[0] + 0.5) / (n + 2.0);
        p.p01 = (t[1] + 0.5) / (n + 2.0);
        p.p11 = (t[2] + 0.5) / (n + 2.0);
        return p;
    };
    p.pi1 = pooled(tot1);
    p.pi0 = pooled(tot0);
    return p;
}

FitResult fit(const std::vector<StudyTable>& data, const ModelParams& start,
              const FitOptions& opt) {
    FitResult res;
    res.params = start;
    if (data.size() < 2) {
        res.error = "at least two studies are required";
        return res;
    }
    LikelihoodOptions lopt;
    lopt.nq = opt.nq;
    lopt.threads = opt.threads;
    LikelihoodEngine engine(data, lopt);

    ModelParams current = start;
    BfgsOutcome best;
    ParamPacker packer(current, opt.tau_cap);
    int total_iter = 0, total_eval = 0;
    for (int round = 0; round < 6; ++round) {
        packer = ParamPacker(current, opt.tau_cap);
        Objective obj{[&](const Vec& x) {
            return -engine.loglik(packer.unpack(x));
        }};
        best = bfgs_minimize(obj, packer.pack(current), opt);
        total_iter += best.iterations;
        total_eval += obj.n_eval;
        current = packer.unpack(best.x);
        // Frechet replacement of edges at the dependence boundary
        bool replaced = false;
        for (int k = 0; k < 5; ++k) {
            if (current.boundary[k] != 0 || packer.tau_index(k) < 0) continue;
            if (std::fabs(current.taus[k]) < opt.tau_cap - 1e-3) continue;
            current.boundary[k] = current.taus[k] > 0.0 ? 1 : -1;
            current.taus[k] = current.taus[k] > 0.0 ? opt.tau_cap : -opt.tau_cap;
            replaced = true;
        }
        if (!replaced) break;
    }
    res.params = current;
    res.neg_loglik = best.f;
    res.converged = best.converged && best.f < kHuge;
    res.iterations = total_iter;
    res.n_eval = total_eval;
    res.grad_norm = sup_norm(best.grad);
    res.derived = derived_accuracy(current);
    if (!res.converged) {
        if (best.f >= kHuge) res.error = "likelihood evaluation failed";
        return res;
    }

    // --- observed-information standard errors ---------------------------
    const std::size_t n = best.x.size();
    Objective obj{[&](const Vec& x) { return -engine.loglik(packer.unpack(x)); }};
    std::vector<Vec> hess(n, Vec(n));
    Vec xp = best.x;
    for (std::size_t j = 0; j < n; ++j) {
        double h = 1e-4 * std::max(1.0, std::fabs(best.x[j]));
        xp[j] = best.x[j] + h;
        Vec gp = obj.gradient(xp);
        xp[j] = best.x[j];
        for (std::size_t i = 0; i < n; ++i)
            hess[j][i] = (gp[i] - best.grad[i]) / h;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            hess[i][j] = hess[j][i] = 0.5 * (hess[i][j] + hess[j][i]);
    std::fill(res.se_tau.begin(), res.se_tau.end(), kNaN);
    if (invert(hess)) {
        // delta method through the packed-to-reported map
        const std::size_t m = 21;
        std::vector<Vec> jac(m, Vec(n));
        for (std::size_t j = 0; j < n; ++j) {
            double h = 1e-6 * std::max(1.0, std::fabs(best.x[j]));
            xp[j] = best.x[j] + h;
            Vec rp = report_vector(packer.unpack(xp));
            xp[j] = best.x[j] - h;
            Vec rm = report_vector(packer.unpack(xp));
            xp[j] = best.x[j];
            for (std::size_t i = 0; i < m; ++i)
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
        }
        Vec se(m, kNaN);
        bool all_ok = true;
        for (std::size_t i = 0; i < m; ++i) {
            double var = 0.0;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    var += jac[i][a] * hess[a][b] * jac[i][b];
            if (var >= 0.0)
                se[i] = std::sqrt(var);
            else
                all_ok = false;
        }
        res.se_available = all_ok;
        for (int j = 0; j < 3; ++j) {
            res.se_pi1[j] = se[j];
            res.se_pi0[j] = se[3 + j];
            res.se_disp1[j] = se[6 + j];
            res.se_disp0[j] = se[9 + j];
        }
        for (int k = 0; k < 5; ++k)
            res.se_tau[k] = packer.tau_index(k) >= 0 ? se[12 + k] : kNaN;
        for (int j = 0; j < 4; ++j) res.se_derived[j] = se[17 + j];
    }
    return res;
}

FitResult fit(const std::vector<StudyTable>& data, MarginFamily margins,
              const FamilyChoice& family, const LabelOrder& order,
              const FitOptions& opt) {
    ModelParams base = initial_params(data, margins, family, order);
    if (!opt.multistart || data.size() < 2) return fit(data, base, opt);

    // Alternative starts differ only in the dependence parameters; a short
    // capped run from each selects the basin for the full optimisation.
    std::vector<ModelParams> starts{base};
    for (double t : {0.25, -0.25}) {
        ModelParams v = base;
        bool distinct = false;
        for (int k = 0; k < 5; ++k) {
            auto [lo, hi] = v.families[k].tau_span();
            lo = std::max(lo, -opt.tau_cap) + 0.02;
            hi = std::min(hi, opt.tau_cap) - 0.02;
            if (hi <= lo) continue;
            double tk = std::clamp(t, lo, hi);
            if (std::fabs(tk - v.taus[k]) > 1e-6) distinct = true;
            v.taus[k] = tk;
        }
        if (distinct) starts.push_back(v);
    }
    if (starts.size() == 1) return fit(data, base, opt);

    LikelihoodOptions lopt;
    lopt.nq = opt.nq;
    lopt.threads = opt.threads;
    LikelihoodEngine engine(data, lopt);
    FitOptions screen = opt;
    screen.max_iter = 15;
    ModelParams pick = base;
    double best_f = kHuge;
    for (const ModelParams& s : starts) {
        ParamPacker packer(s, opt.tau_cap);
        Objective obj{[&](const Vec& x) {
            return -engine.loglik(packer.unpack(x));
        }};
        BfgsOutcome o = bfgs_minimize(obj, packer.pack(s), screen);
        if (o.f < best_f) {
            best_f = o.f;
            pick = packer.unpack(o.x);
        }
    }
    return fit(data, pick, opt);
}

const std::vector<std::string> kDefaultFamilyMenu = {
    "bvn", "frank", "cln180-90", "cln180-270", "cln0-90", "cln0-270"};

std::vector<SelectEntry> model_select(const std::vector<StudyTable>& data,
                                      const std::vector<std::string>& families,
                                      const std::vector<MarginFamily>& margins,
                                      const LabelOrder& order,
                                      const FitOptions& opt) {
    std::vector<SelectEntry> entries;
    for (const std::string& f : families)
        for (MarginFamily m : margins) entries.push_back({f, m, {}, false});
    FitOptions single = opt;
    single.threads = 1;
    parallel_for(entries.size(), opt.threads, [&](std::size_t i) {
        SelectEntry& e = entries[i];
        try {
            e.result = fit(data, e.margins, parse_family(e.family), order, single);
            e.ok = e.result.converged;
        } catch (const std::exception& ex) {
            e.result.error = ex.what();
        }
    });
    std::stable_sort(entries.begin(), entries.end(),
                     [](const SelectEntry& a, const SelectEntry& b) {
                         if (a.ok != b.ok) return a.ok;
                         return a.result.neg_loglik < b.result.neg_loglik;
                     });
    return entries;
}

}  // namespace vinemeta
