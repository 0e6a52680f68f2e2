#pragma once

#include "vinemeta/estimate.hpp"
#include "vinemeta/rng.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace vinemeta {

struct Scenario {
    ModelParams truth;
    int n_studies = 11;
    int replications = 1000;
    std::uint64_t seed = 1;
    // shifted-gamma study sizes: lag + Gamma(shape, rate), rounded
    double size_shape = 1.2;
    double size_rate = 0.01;
    double size_lag = 30.0;
};

/// The benchmark truth for either margin family (all-BVN edges).
Scenario benchmark_scenario(MarginFamily margins);

/// One arm size: round(lag + Gamma(shape, rate)).
int simulate_study_size(Rng& rng, const Scenario& sc);

/// Draw one replication's study list from the scenario truth.
std::vector<StudyTable> simulate_replication(const Scenario& sc, Rng& rng);

struct SimRow {
    std::string name;
    double truth = 0.0;
    // all scaled by 100; NaN when not estimable (e.g. single replication SD)
    double bias = 0.0, sd = 0.0, rmse = 0.0, sqrt_vbar = 0.0;
};

struct SimSummary {
    std::vector<SimRow> rows;
    int replications = 0;
    int converged = 0;   // aggregation covers only these
    int se_missing = 0;  // converged fits without usable variances
};

/// Fit every replication under (fit_margins, fit_family) and aggregate
/// bias/SD/RMSE and the mean theoretical variance per parameter shared by
/// the truth and the fitted model.  Replications run in parallel on
/// deterministic substreams.
SimSummary run_study(const Scenario& sc, MarginFamily fit_margins,
                     const FamilyChoice& fit_family, const FitOptions& fit_opt,
                     int threads = 0);

}  // namespace vinemeta
