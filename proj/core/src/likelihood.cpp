#include "vinemeta/likelihood.hpp"

#include "vinemeta/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

namespace vinemeta {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Streaming log-sum-exp with a running maximum and compensated summation of
/// the rescaled mantissas.
struct LseAcc {
    double m = kNegInf;
    double s = 0.0, c = 0.0;

    void add_raw(double x) {  // Kahan step
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    void add(double g) {
        if (!(g > kNegInf)) return;
        if (g <= m) {
            add_raw(std::exp(g - m));
        } else {
            if (s != 0.0) {
                double f = std::exp(m - g);
                s *= f;
                c *= f;
            }
            m = g;
            add_raw(1.0);
        }
    }
    double value() const { return s > 0.0 ? m + std::log(s) : kNegInf; }
};

double xlogy(double x, double y) { return x > 0.0 ? x * std::log(y) : 0.0; }

/// log of the largest multinomial mass attainable over the probability
/// simplex (attained at p = y/n).
double logpmf_cap(const std::array<int, 4>& y) {
    int n = y[0] + y[1] + y[2] + y[3];
    if (n == 0) return 0.0;
    double cap = std::lgamma(static_cast<double>(n) + 1.0);
    for (int yk : y) {
        cap -= std::lgamma(static_cast<double>(yk) + 1.0);
        cap += xlogy(static_cast<double>(yk), static_cast<double>(yk) / n);
    }
    return cap;
}

/// max over x in (0,1) of a log x + b log(1-x).
double beta_term_cap(double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return xlogy(a, a / (a + b)) + xlogy(b, b / (a + b));
}

struct StudyCoefs {
    // position-aligned multinomial exponents under the decomposition
    std::array<double, 6> y{};           // cell count at each position
    std::array<double, 6> a{}, b{};      // sequential-proportion exponents
    std::array<double, 2> n{};           // arm totals, indexed by arm t
    double logc = 0.0;                   // multinomial coefficients, both arms
    double inner_cap = 0.0;              // bound on the level 4-6 log-factor
    bool has_cap = true;
};

void hash_mix(std::uint64_t& h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
}
void hash_mix(std::uint64_t& h, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    hash_mix(h, bits);
}

}  // namespace

double multinomial_logpmf(const std::array<long long, 4>& y,
                          const std::array<double, 3>& p) {
    long long n = 0;
    for (long long yk : y) {
        if (yk < 0) throw DataError("multinomial_logpmf: negative count");
        n += yk;
    }
    double p4 = 1.0 - p[0] - p[1] - p[2];
    if (!(p[0] > 0.0 && p[1] > 0.0 && p[2] > 0.0 && p4 > 0.0))
        throw std::domain_error("multinomial_logpmf: invalid cell probabilities");
    double lp = std::lgamma(static_cast<double>(n) + 1.0);
    const std::array<double, 4> probs = {p[0], p[1], p[2], p4};
    for (int k = 0; k < 4; ++k) {
        lp -= std::lgamma(static_cast<double>(y[k]) + 1.0);
        lp += static_cast<double>(y[k]) * std::log(probs[k]);
    }
    return lp;
}

struct LikelihoodEngine::Impl {
    QuadratureRule rule;
    std::vector<double> logw;

    // grid cache
    std::uint64_t grid_key = 0;
    std::unique_ptr<DependentGrid> grid;

    // beta quantile-spline cache, one slot per position
    struct BetaSlot {
        double pi = -1.0, gamma = -1.0;
        BetaQuantileGrid spline;
    };
    std::array<BetaSlot, 6> beta_slots;

    // inner-factor cache: per study, level-3 prefix -> log of the level 4-6
    // partial sum (weights included)
    std::uint64_t inner_key = 0;
    std::vector<std::unordered_map<std::uint32_t, double>> inner;

    const BetaQuantileGrid& beta_spline(int pos, const BetaMargin& m) {
        BetaSlot& slot = beta_slots[pos];
        if (slot.pi != m.pi || slot.gamma != m.gamma) {
            slot.spline = BetaQuantileGrid(m);
            slot.pi = m.pi;
            slot.gamma = m.gamma;
        }
        return slot.spline;
    }
};

LikelihoodEngine::LikelihoodEngine(std::vector<StudyTable> data,
                                   LikelihoodOptions opt)
    : data_(std::move(data)), opt_(opt), impl_(std::make_unique<Impl>()) {
    impl_->rule = gauss_legendre(opt_.nq);
    impl_->logw.resize(opt_.nq);
    for (int q = 0; q < opt_.nq; ++q)
        impl_->logw[q] = std::log(impl_->rule.weights[q]);
    impl_->inner.resize(data_.size());
}

LikelihoodEngine::~LikelihoodEngine() = default;

double LikelihoodEngine::loglik(const ModelParams& params) {
    Impl& im = *impl_;
    const int nq = opt_.nq;
    const std::size_t n3 = static_cast<std::size_t>(nq) * nq * nq;
    const std::size_t n_study = data_.size();
    const bool normal = params.margins == MarginFamily::Normal;
    const VineSpec spec = params.vine();

    // --- dependent grid, cached on the edge copulas ---------------------
    std::uint64_t gkey = 0;
    for (Label l : params.order) hash_mix(gkey, (std::uint64_t)label_code(l));
    for (const PairCopula& e : spec.edges) {
        hash_mix(gkey, (std::uint64_t)e.family());
        hash_mix(gkey, e.theta());
    }
    hash_mix(gkey, (std::uint64_t)nq);
    if (!im.grid || im.grid_key != gkey) {
        im.grid = std::make_unique<DependentGrid>(spec, im.rule);
        im.grid_key = gkey;
    }
    const DependentGrid& grid = *im.grid;

    // --- per-position margins and level feature arrays ------------------
    const auto pm = position_margins(params);
    // feature arrays for levels 1..5; level 6 is streamed
    std::array<std::vector<double>, 5> fx;    // normal: mu + sigma * z
    std::array<std::vector<double>, 5> flx;   // beta: log x
    std::array<std::vector<double>, 5> fl1x;  // beta: log(1-x)
    std::array<const BetaQuantileGrid*, 6> spline{};
    if (!normal)
        for (int p = 0; p < 6; ++p) spline[p] = &im.beta_spline(p, pm[p].beta);

    for (int lv = 0; lv < 5; ++lv) {
        const std::vector<double>& z = grid.level_z(lv + 1);
        if (normal) {
            fx[lv].resize(z.size());
            const double mu = pm[lv].normal.mu, sg = pm[lv].normal.sigma;
            for (std::size_t i = 0; i < z.size(); ++i) fx[lv][i] = mu + sg * z[i];
        } else {
            flx[lv].resize(z.size());
            fl1x[lv].resize(z.size());
            const BetaQuantileGrid& bg = *spline[lv];
            for (std::size_t i = 0; i < z.size(); ++i) {
                double x = bg.from_z(z[i]);
                flx[lv][i] = std::log(x);
                fl1x[lv][i] = std::log1p(-x);
            }
        }
    }

    // --- arm layout under the decomposition -----------------------------
    std::array<int, 2> comp_level{};             // level at which arm t completes
    std::array<int, 2> first_level{7, 7};        // level of arm t's first label
    for (int p = 0; p < 6; ++p) {
        int t = label_arm(params.order[p]);
        comp_level[t] = p + 1;
        first_level[t] = std::min(first_level[t], p + 1);
    }

    // For normal margins the within-arm normalizer log(1 + sum exp x) enters
    // at the arm's completion level; accumulate per-arm exp-sums down the
    // levels, keeping the completion-level log-normalizers and the level-5
    // partials of the arm that completes at level 6.
    std::array<std::vector<double>, 5> comp_logd;  // by level, empty if none
    std::vector<double> s5;                        // exp-partials at level 5
    if (normal) {
        std::array<std::vector<double>, 2> s_prev;
        for (int lv = 0; lv < 5; ++lv) {
            const std::vector<double>& x = fx[lv];
            int t = label_arm(params.order[lv]);
            std::array<std::vector<double>, 2> s_cur;
            for (int arm = 0; arm < 2; ++arm) {
                if (first_level[arm] > lv + 1 || comp_level[arm] <= lv) continue;
                s_cur[arm].resize(x.size());
                const std::vector<double>* prev =
                    s_prev[arm].empty() ? nullptr : &s_prev[arm];
                for (std::size_t i = 0; i < x.size(); ++i) {
                    double s = prev ? (*prev)[i / nq] : 0.0;
                    if (arm == t) s += std::exp(x[i]);
                    s_cur[arm][i] = s;
                }
                if (comp_level[arm] == lv + 1) {
                    comp_logd[lv].resize(x.size());
                    for (std::size_t i = 0; i < x.size(); ++i)
                        comp_logd[lv][i] = std::log1p(s_cur[arm][i]);
                    s_cur[arm].clear();
                }
            }
            s_prev = std::move(s_cur);
        }
        int t6 = label_arm(params.order[5]);
        s5 = std::move(s_prev[t6]);
    }

    // --- per-study multinomial exponents --------------------------------
    std::vector<StudyCoefs> coefs(n_study);
    for (std::size_t i = 0; i < n_study; ++i) {
        const StudyTable& st = data_[i];
        StudyCoefs& sc = coefs[i];
        const std::array<const std::array<int, 4>*, 2> counts = {
            &st.non_diseased, &st.diseased};
        for (int t = 0; t < 2; ++t) {
            const auto& yarr = *counts[t];
            int n = yarr[0] + yarr[1] + yarr[2] + yarr[3];
            sc.n[t] = static_cast<double>(n);
            if (n == 0) continue;
            sc.logc += std::lgamma(static_cast<double>(n) + 1.0);
            for (int yk : yarr)
                sc.logc -= std::lgamma(static_cast<double>(yk) + 1.0);
            double cum = 0.0;
            for (int p = 0; p < 6; ++p) {
                if (label_arm(params.order[p]) != t) continue;
                double yk =
                    static_cast<double>(yarr[label_cell(params.order[p])]);
                sc.y[p] = yk;
                cum += yk;
                sc.a[p] = yk;
                sc.b[p] = static_cast<double>(n) - cum;
            }
            // bound on the arm's level 4-6 contribution, for pruning
            if (comp_level[t] <= 3) continue;
            if (!normal) {
                for (int p = 3; p < 6; ++p)
                    if (label_arm(params.order[p]) == t)
                        sc.inner_cap += beta_term_cap(sc.a[p], sc.b[p]);
            } else if (first_level[t] > 3) {
                sc.inner_cap += logpmf_cap(yarr);
            } else {
                sc.has_cap = false;  // arm straddles the split: no bound
            }
        }
    }

    // --- inner-factor cache key -----------------------------------------
    std::uint64_t ikey = gkey;
    hash_mix(ikey, (std::uint64_t)params.margins);
    auto mix_margin = [&](int p) {
        if (normal) {
            hash_mix(ikey, pm[p].normal.mu);
            hash_mix(ikey, pm[p].normal.sigma);
        } else {
            hash_mix(ikey, pm[p].beta.pi);
            hash_mix(ikey, pm[p].beta.gamma);
        }
    };
    for (int p = 3; p < 6; ++p) mix_margin(p);
    if (normal)
        for (int t = 0; t < 2; ++t)
            if (comp_level[t] > 3 && first_level[t] <= 3)
                for (int p = 0; p < 3; ++p)
                    if (label_arm(params.order[p]) == t) mix_margin(p);
    if (im.inner_key != ikey) {
        for (auto& m : im.inner) m.clear();
        im.inner_key = ikey;
    }

    // --- level 1-3 per-study log-factors --------------------------------
    auto level_term = [&](std::size_t i, int lv, std::size_t idx) -> double {
        const StudyCoefs& sc = coefs[i];
        double g;
        if (normal) {
            g = sc.y[lv] * fx[lv][idx];
            if (!comp_logd[lv].empty())
                g -= sc.n[label_arm(params.order[lv])] * comp_logd[lv][idx];
        } else {
            g = sc.a[lv] * flx[lv][idx] + sc.b[lv] * fl1x[lv][idx];
        }
        return g;
    };

    std::vector<double> base(n_study * n3);  // log weight + level 1-3 factor
    const std::vector<double>& logw = im.logw;
    parallel_for(n_study, opt_.threads, [&](std::size_t i) {
        std::vector<double> g1(nq), g2((std::size_t)nq * nq);
        for (int q1 = 0; q1 < nq; ++q1)
            g1[q1] = logw[q1] + level_term(i, 0, q1);
        for (std::size_t idx = 0; idx < g2.size(); ++idx)
            g2[idx] = g1[idx / nq] + logw[idx % nq] + level_term(i, 1, idx);
        double* row = base.data() + i * n3;
        for (std::size_t idx = 0; idx < n3; ++idx)
            row[idx] = g2[idx / nq] + logw[idx % nq] + level_term(i, 2, idx);
    });

    // --- inner evaluation machinery -------------------------------------
    struct Job {
        std::uint32_t p3;
        std::vector<std::uint32_t> studies;
        std::vector<double> log_inner;
    };
    const int arm6 = label_arm(params.order[5]);
    auto run_jobs = [&](std::vector<Job>& jobs) {
        parallel_for(jobs.size(), opt_.threads, [&](std::size_t ji) {
            Job& job = jobs[ji];
            job.log_inner.assign(job.studies.size(), kNegInf);
            std::vector<LseAcc> acc(job.studies.size());
            std::vector<double> g4(job.studies.size());
            std::vector<double> z6(nq), xr(nq), lxr(nq), l1xr(nq), ldr(nq);
            for (int q4 = 0; q4 < nq; ++q4) {
                std::size_t idx4 = (std::size_t)job.p3 * nq + q4;
                for (std::size_t s = 0; s < job.studies.size(); ++s)
                    g4[s] = logw[q4] + level_term(job.studies[s], 3, idx4);
                for (int q5 = 0; q5 < nq; ++q5) {
                    std::size_t idx5 = idx4 * nq + q5;
                    grid.level6_row(idx5, nullptr, z6.data());
                    if (normal) {
                        const double mu = pm[5].normal.mu, sg = pm[5].normal.sigma;
                        const double sp = s5.empty() ? 0.0 : s5[idx5];
                        for (int q = 0; q < nq; ++q) {
                            xr[q] = mu + sg * z6[q];
                            ldr[q] = std::log1p(sp + std::exp(xr[q]));
                        }
                    } else {
                        for (int q = 0; q < nq; ++q) {
                            double x = spline[5]->from_z(z6[q]);
                            lxr[q] = std::log(x);
                            l1xr[q] = std::log1p(-x);
                        }
                    }
                    for (std::size_t s = 0; s < job.studies.size(); ++s) {
                        std::size_t i = job.studies[s];
                        const StudyCoefs& sc = coefs[i];
                        double pref =
                            g4[s] + logw[q5] + level_term(i, 4, idx5);
                        if (normal) {
                            const double yv = sc.y[5], nt = sc.n[arm6];
                            for (int q6 = 0; q6 < nq; ++q6)
                                acc[s].add(pref + logw[q6] + yv * xr[q6] -
                                           nt * ldr[q6]);
                        } else {
                            const double av = sc.a[5], bv = sc.b[5];
                            for (int q6 = 0; q6 < nq; ++q6)
                                acc[s].add(pref + logw[q6] + av * lxr[q6] +
                                           bv * l1xr[q6]);
                        }
                    }
                }
            }
            for (std::size_t s = 0; s < job.studies.size(); ++s)
                job.log_inner[s] = acc[s].value();
        });
    };
    auto group_jobs = [&](std::vector<std::pair<std::uint32_t, std::uint32_t>>&
                              pairs) {  // (p3, study)
        std::sort(pairs.begin(), pairs.end());
        std::vector<Job> jobs;
        for (auto& pr : pairs) {
            if (jobs.empty() || jobs.back().p3 != pr.first)
                jobs.push_back({pr.first, {}, {}});
            jobs.back().studies.push_back(pr.second);
        }
        return jobs;
    };
    auto cached_inner = [&](std::size_t i, std::uint32_t p3, double* out) {
        auto it = im.inner[i].find(p3);
        if (it == im.inner[i].end()) return false;
        *out = it->second;
        return true;
    };

    // --- seed pass: best level-3 prefix per study -----------------------
    const bool prune = opt_.prune_log_margin > 0.0;
    std::vector<std::uint32_t> seed_p3(n_study);
    std::vector<double> seed_t(n_study, kNegInf);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> want;
    for (std::size_t i = 0; i < n_study; ++i) {
        const double* row = base.data() + i * n3;
        seed_p3[i] = static_cast<std::uint32_t>(
            std::max_element(row, row + n3) - row);
        double li;
        if (cached_inner(i, seed_p3[i], &li))
            seed_t[i] = row[seed_p3[i]] + li;
        else
            want.push_back({seed_p3[i], static_cast<std::uint32_t>(i)});
    }
    {
        auto jobs = group_jobs(want);
        run_jobs(jobs);
        for (auto& job : jobs)
            for (std::size_t s = 0; s < job.studies.size(); ++s) {
                std::size_t i = job.studies[s];
                im.inner[i][job.p3] = job.log_inner[s];
                seed_t[i] = base[i * n3 + job.p3] + job.log_inner[s];
            }
    }

    // --- main pass: all prefixes within the pruning margin --------------
    const double slack = opt_.prune_log_margin + 3.0 * std::log((double)nq);
    std::vector<LseAcc> total(n_study);
    want.clear();
    for (std::size_t i = 0; i < n_study; ++i) {
        total[i].add(seed_t[i]);
        const double* row = base.data() + i * n3;
        const double cut = (prune && coefs[i].has_cap)
                               ? seed_t[i] - slack - coefs[i].inner_cap
                               : kNegInf;
        for (std::uint32_t p3 = 0; p3 < n3; ++p3) {
            if (p3 == seed_p3[i] || row[p3] <= cut) continue;
            double li;
            if (cached_inner(i, p3, &li))
                total[i].add(row[p3] + li);
            else
                want.push_back({p3, static_cast<std::uint32_t>(i)});
        }
    }
    {
        auto jobs = group_jobs(want);
        run_jobs(jobs);
        for (auto& job : jobs)
            for (std::size_t s = 0; s < job.studies.size(); ++s) {
                std::size_t i = job.studies[s];
                im.inner[i][job.p3] = job.log_inner[s];
                total[i].add(base[i * n3 + job.p3] + job.log_inner[s]);
            }
    }

    double sum = 0.0;
    for (std::size_t i = 0; i < n_study; ++i) {
        double li = total[i].value() + coefs[i].logc;
        if (!std::isfinite(li))
            throw LikelihoodError("non-finite study likelihood",
                                  static_cast<int>(i));
        sum += li;
    }
    return sum;
}

double joint_loglik(const ModelParams& params,
                    const std::vector<StudyTable>& data,
                    const QuadratureRule& rule) {
    LikelihoodOptions opt;
    opt.nq = static_cast<int>(rule.nodes.size());
    LikelihoodEngine engine(data, opt);
    return engine.loglik(params);
}

}  // namespace vinemeta
