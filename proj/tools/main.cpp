// vinemeta: joint meta-analysis of two paired diagnostic tests via a
// truncated D-vine copula mixed model.
#include "vinemeta/data.hpp"
#include "vinemeta/estimate.hpp"
#include "vinemeta/parallel.hpp"
#include "vinemeta/simstudy.hpp"
#include "vinemeta/sroc.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using nlohmann::json;
using namespace vinemeta;

namespace {

constexpr int kExitData = 2, kExitConvergence = 3, kExitConfig = 4;

struct CliError : std::runtime_error {
    CliError(const std::string& what, int code_)
        : std::runtime_error(what), code(code_) {}
    int code;
};

std::string disp_prefix(MarginFamily m) {
    return m == MarginFamily::Normal ? "sigma" : "gamma";
}

std::string tau_key(const LabelOrder& o, int k) {
    return "tau" + label_str(o[k]) + "_" + label_str(o[k + 1]);
}

const std::array<std::string, 4> kDerivedKeys = {"pi1_1", "pi_11", "pi1_0",
                                                 "pi_10"};

json fit_to_json(const FitResult& r, const std::string& family, int nq) {
    const ModelParams& p = r.params;
    json j;
    j["margins"] = margin_family_name(p.margins);
    j["family"] = family;
    j["permutation"] = order_str(p.order);
    j["nq"] = nq;
    for (Label l : kCanonicalLabels) {
        int t = label_arm(l), c = label_cell(l);
        j["pi" + label_str(l)] = p.pi(t)[c];
        j["se_pi" + label_str(l)] = t == 1 ? r.se_pi1[c] : r.se_pi0[c];
    }
    const std::string dp = disp_prefix(p.margins);
    for (Label l : kCanonicalLabels) {
        int t = label_arm(l), c = label_cell(l);
        j[dp + label_str(l)] = p.disp(t)[c];
        j["se_" + dp + label_str(l)] = t == 1 ? r.se_disp1[c] : r.se_disp0[c];
    }
    json boundary = json::object();
    for (int k = 0; k < 5; ++k) {
        j[tau_key(p.order, k)] = p.taus[k];
        j["se_" + tau_key(p.order, k)] = r.se_tau[k];
        if (p.boundary[k] != 0)
            boundary[tau_key(p.order, k)] =
                p.boundary[k] > 0 ? "comonotonic" : "countermonotonic";
    }
    j["boundary"] = boundary;
    for (int d = 0; d < 4; ++d) {
        j[kDerivedKeys[d]] = r.derived[d];
        j["se_" + kDerivedKeys[d]] = r.se_derived[d];
    }
    j["negloglik"] = r.neg_loglik;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["n_eval"] = r.n_eval;
    j["grad_norm"] = r.grad_norm;
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

void set_cell(ProbTriplet& p, int c, double v) {
    if (c == 0)
        p.p10 = v;
    else if (c == 1)
        p.p01 = v;
    else
        p.p11 = v;
}

std::pair<ModelParams, std::string> params_from_json(const json& j) {
    ModelParams p;
    p.margins = parse_margin_family(j.at("margins").get<std::string>());
    std::string family = j.at("family").get<std::string>();
    FamilyChoice fc = parse_family(family);
    p.order = parse_order(j.at("permutation").get<std::string>());
    for (Label l : kCanonicalLabels) {
        int t = label_arm(l), c = label_cell(l);
        double pi = j.at("pi" + label_str(l)).get<double>();
        double d = j.at(disp_prefix(p.margins) + label_str(l)).get<double>();
        set_cell(t == 1 ? p.pi1 : p.pi0, c, pi);
        (t == 1 ? p.disp1 : p.disp0)[c] = d;
    }
    for (int k = 0; k < 5; ++k) {
        p.families[k] = fc;
        p.taus[k] = j.at(tau_key(p.order, k)).get<double>();
        if (j.contains("boundary") && j["boundary"].contains(tau_key(p.order, k)))
            p.boundary[k] =
                j["boundary"][tau_key(p.order, k)] == "comonotonic" ? 1 : -1;
    }
    return {p, family};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw CliError("cannot write " + path, kExitConfig);
    f << text;
    if (!f.good()) throw CliError("write failed: " + path, kExitConfig);
}

std::vector<StudyTable> load_data(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw CliError("data file not found: " + path, kExitConfig);
    return read_study_csv(path);  // DataError on malformed contents
}

void print_fit_summary(const FitResult& r, const std::string& family) {
    const ModelParams& p = r.params;
    std::printf("family=%s margins=%s  -logL=%.4f  %s (%d iter, %d evals)\n",
                family.c_str(), margin_family_name(p.margins).c_str(),
                r.neg_loglik, r.converged ? "converged" : "NOT CONVERGED",
                r.iterations, r.n_eval);
    for (Label l : kCanonicalLabels) {
        int t = label_arm(l), c = label_cell(l);
        std::printf("  pi%s = %.4f (%.4f)   %s%s = %.4f (%.4f)\n",
                    label_str(l).c_str(), p.pi(t)[c],
                    t == 1 ? r.se_pi1[c] : r.se_pi0[c],
                    disp_prefix(p.margins).c_str(), label_str(l).c_str(),
                    p.disp(t)[c], t == 1 ? r.se_disp1[c] : r.se_disp0[c]);
    }
    for (int k = 0; k < 5; ++k) {
        if (p.boundary[k] != 0)
            std::printf("  %s = %.2f (boundary)\n", tau_key(p.order, k).c_str(),
                        p.taus[k]);
        else
            std::printf("  %s = %.4f (%.4f)\n", tau_key(p.order, k).c_str(),
                        p.taus[k], r.se_tau[k]);
    }
}

int run(int argc, char** argv) {
    CLI::App app{"truncated D-vine copula meta-analysis of two diagnostic tests"};
    app.require_subcommand(1);

    // shared option state
    std::string data_path, out_path, margins_s = "normal", family_s = "bvn";
    std::string perm_s = order_str(kDefaultOrder);
    int nq = kDefaultQuadSize, threads = 0;
    std::uint64_t seed = 1;

    auto* c_fit = app.add_subcommand("fit", "maximum-likelihood fit");
    c_fit->add_option("--data", data_path)->required();
    c_fit->add_option("--margins", margins_s)->check(CLI::IsMember({"normal", "beta"}));
    c_fit->add_option("--family", family_s);
    c_fit->add_option("--permutation", perm_s);
    c_fit->add_option("--nq", nq)->check(CLI::Range(1, 100));
    c_fit->add_option("--threads", threads);
    c_fit->add_option("--seed", seed);
    std::string fit_out = "fit.json";
    c_fit->add_option("--out", fit_out);

    auto* c_sel = app.add_subcommand("select", "rank copula/margin candidates");
    c_sel->add_option("--data", data_path)->required();
    std::vector<std::string> families = kDefaultFamilyMenu;
    std::vector<std::string> margin_list = {"normal", "beta"};
    c_sel->add_option("--families", families)->delimiter(',');
    c_sel->add_option("--margins", margin_list)->delimiter(',');
    c_sel->add_option("--permutation", perm_s);
    c_sel->add_option("--nq", nq)->check(CLI::Range(1, 100));
    c_sel->add_option("--threads", threads);
    std::string sel_out = "table.json";
    c_sel->add_option("--out", sel_out);
    bool all_perms = false;
    c_sel->add_flag("--all-permutations", all_perms,
                    "sweep all 360 decompositions of the best candidate");

    auto* c_sroc = app.add_subcommand("sroc", "SROC curves and predictive region");
    std::string fit_path;
    c_sroc->add_option("--fit", fit_path)->required();
    c_sroc->add_option("--data", data_path);
    std::vector<double> qs = {0.01, 0.5, 0.99};
    c_sroc->add_option("--q", qs)->delimiter(',');
    int grid = 200;
    c_sroc->add_option("--grid", grid)->check(CLI::Range(2, 4000));
    c_sroc->add_option("--nq", nq)->check(CLI::Range(1, 100));
    c_sroc->add_option("--threads", threads);
    std::string sroc_out = "sroc";
    c_sroc->add_option("--out", sroc_out);

    auto* c_sim = app.add_subcommand("simulate", "emit a synthetic dataset");
    std::string scenario_s = "normal";
    int n_studies = 11;
    double lag = 30.0;
    c_sim->add_option("--scenario", scenario_s)->check(CLI::IsMember({"normal", "beta"}));
    c_sim->add_option("--studies", n_studies)->check(CLI::Range(1, 100000));
    c_sim->add_option("--seed", seed);
    c_sim->add_option("--lag", lag);
    std::string sim_out = "data.csv";
    c_sim->add_option("--out", sim_out);

    auto* c_ss = app.add_subcommand("simstudy", "bias/SD/RMSE simulation study");
    int reps = 1000;
    std::string fit_margins_s, fit_family_s = "bvn";
    c_ss->add_option("--scenario", scenario_s)->check(CLI::IsMember({"normal", "beta"}));
    c_ss->add_option("--reps", reps)->check(CLI::Range(1, 1000000));
    c_ss->add_option("--studies", n_studies)->check(CLI::Range(2, 100000));
    c_ss->add_option("--nq", nq)->check(CLI::Range(1, 100));
    c_ss->add_option("--seed", seed);
    c_ss->add_option("--lag", lag);
    c_ss->add_option("--threads", threads);
    c_ss->add_option("--fit-margins", fit_margins_s)
        ->check(CLI::IsMember({"normal", "beta"}));
    c_ss->add_option("--fit-family", fit_family_s);
    std::string ss_out = "table2.csv";
    c_ss->add_option("--out", ss_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (c_fit->parsed()) {
        auto data = load_data(data_path);
        FitOptions opt;
        opt.nq = nq;
        opt.threads = threads;
        FitResult r = fit(data, parse_margin_family(margins_s),
                          parse_family(family_s), parse_order(perm_s), opt);
        write_text(fit_out, fit_to_json(r, family_s, nq).dump(2) + "\n");
        print_fit_summary(r, family_s);
        return r.converged ? 0 : kExitConvergence;
    }

    if (c_sel->parsed()) {
        auto data = load_data(data_path);
        FitOptions opt;
        opt.nq = nq;
        opt.threads = threads;
        std::vector<MarginFamily> ms;
        for (const auto& m : margin_list) ms.push_back(parse_margin_family(m));
        auto ranked = model_select(data, families, ms, parse_order(perm_s), opt);
        json arr = json::array();
        std::printf("%-12s %-7s %12s  %s\n", "family", "margins", "-logL", "status");
        for (const auto& e : ranked) {
            json j = fit_to_json(e.result, e.family, nq);
            j["ok"] = e.ok;
            arr.push_back(j);
            std::printf("%-12s %-7s %12.4f  %s\n", e.family.c_str(),
                        margin_family_name(e.margins).c_str(),
                        e.result.neg_loglik, e.ok ? "ok" : "failed");
        }
        json out;
        out["ranking"] = arr;
        if (all_perms && !ranked.empty() && ranked.front().ok) {
            const auto& best = ranked.front();
            json sweep = json::array();
            auto orders = enumerate_decompositions();
            std::vector<json> rows(orders.size());
            FitOptions single = opt;
            single.threads = 1;
            parallel_for(orders.size(), threads, [&](std::size_t i) {
                FitResult r = fit(data, best.margins, parse_family(best.family),
                                  orders[i], single);
                json j;
                j["permutation"] = order_str(orders[i]);
                j["negloglik"] = r.neg_loglik;
                j["converged"] = r.converged;
                rows[i] = j;
            });
            for (auto& j : rows) sweep.push_back(j);
            out["permutation_sweep"] = sweep;
        }
        write_text(sel_out, out.dump(2) + "\n");
        bool any_ok = !ranked.empty() && ranked.front().ok;
        return any_ok ? 0 : kExitConvergence;
    }

    if (c_sroc->parsed()) {
        if (!std::filesystem::exists(fit_path))
            throw CliError("fit file not found: " + fit_path, kExitConfig);
        std::ifstream jf(fit_path);
        json j = json::parse(jf);
        auto [params, family] = params_from_json(j);
        FitResult fr;
        fr.params = params;
        fr.converged = true;
        fr.derived = derived_accuracy(params);
        if (params.margins != MarginFamily::Beta || params.order != kSrocOrder) {
            if (data_path.empty())
                throw CliError(
                    "fit is not a beta-margin fit under the SROC permutation; "
                    "pass --data to refit",
                    kExitConfig);
            FitOptions opt;
            opt.nq = nq;
            opt.threads = threads;
            fr = sroc_permute_fit(load_data(data_path), parse_family(family), opt);
            if (!fr.converged) return kExitConvergence;
        }
        std::filesystem::create_directories(sroc_out);
        auto curve_csv = [&](const SrocCurve& c, const std::string& name) {
            std::string text = "x110,x111\n";
            char buf[64];
            for (auto& pt : c.points) {
                std::snprintf(buf, sizeof buf, "%.10g,%.10g\n", pt.first,
                              pt.second);
                text += buf;
            }
            write_text(sroc_out + "/" + name, text);
        };
        for (double q : qs) {
            std::string qs_str = std::to_string(q);
            qs_str.erase(qs_str.find_last_not_of('0') + 1);
            if (!qs_str.empty() && qs_str.back() == '.') qs_str.pop_back();
            curve_csv(sroc_curve(fr, q, grid, true),
                      "curve_x111_on_x110_" + qs_str + ".csv");
            curve_csv(sroc_curve(fr, q, grid, false),
                      "curve_x110_on_x111_" + qs_str + ".csv");
        }
        {
            PredictiveField f = predictive_region(fr, grid);
            std::string text = "x110,x111,density\n";
            char buf[96];
            for (int i = 0; i < f.grid_size; ++i)
                for (int k = 0; k < f.grid_size; ++k) {
                    std::snprintf(
                        buf, sizeof buf, "%.10g,%.10g,%.10g\n", f.x110[i],
                        f.x111[k],
                        f.density[static_cast<std::size_t>(i) * f.grid_size + k]);
                    text += buf;
                }
            write_text(sroc_out + "/region.csv", text);
            char sbuf[128];
            std::snprintf(sbuf, sizeof sbuf, "pi110,pi111,tau111_110\n%.10g,%.10g,%.10g\n",
                          f.pi110, f.pi111, fr.params.taus[0]);
            write_text(sroc_out + "/summary.csv", sbuf);
        }
        if (!data_path.empty()) {
            std::string text = "study,x110_hat,x111_hat\n";
            char buf[128];
            for (const auto& pt : observed_points(load_data(data_path))) {
                std::snprintf(buf, sizeof buf, "%s,%.10g,%.10g\n",
                              pt.study.c_str(), pt.x110_hat, pt.x111_hat);
                text += buf;
            }
            write_text(sroc_out + "/points.csv", text);
        }
        return 0;
    }

    if (c_sim->parsed()) {
        Scenario sc = benchmark_scenario(parse_margin_family(scenario_s));
        sc.n_studies = n_studies;
        sc.seed = seed;
        sc.size_lag = lag;
        Rng rng = Rng::substream(sc.seed, 0);
        write_study_csv(sim_out, simulate_replication(sc, rng));
        std::printf("wrote %d studies to %s\n", n_studies, sim_out.c_str());
        return 0;
    }

    if (c_ss->parsed()) {
        Scenario sc = benchmark_scenario(parse_margin_family(scenario_s));
        sc.n_studies = n_studies;
        sc.replications = reps;
        sc.seed = seed;
        sc.size_lag = lag;
        MarginFamily fm = fit_margins_s.empty()
                              ? sc.truth.margins
                              : parse_margin_family(fit_margins_s);
        FitOptions opt;
        opt.nq = nq;
        SimSummary s = run_study(sc, fm, parse_family(fit_family_s), opt, threads);
        std::string text = "parameter,true,bias,SD,sqrtVbar,RMSE\n";
        char buf[160];
        for (const auto& row : s.rows) {
            std::snprintf(buf, sizeof buf, "%s,%.6g,%.4f,%.4f,%.4f,%.4f\n",
                          row.name.c_str(), row.truth, row.bias, row.sd,
                          row.sqrt_vbar, row.rmse);
            text += buf;
        }
        write_text(ss_out, text);
        std::printf("converged %d/%d replications (%d with missing variances)\n",
                    s.converged, s.replications, s.se_missing);
        return s.converged > 0 ? 0 : kExitConvergence;
    }

    return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const LikelihoodError& e) {
        std::cerr << "likelihood error (study " << e.study << "): " << e.what()
                  << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
