#pragma once

#include "vinemeta/estimate.hpp"

#include <utility>
#include <vector>

namespace vinemeta {

/// Refit with beta margins under the decomposition that places the joint-TPR
/// and joint-FPR latent variables first, so both stay on the original
/// proportion scale and their edge copula drives the summary curve.
FitResult sroc_permute_fit(const std::vector<StudyTable>& data,
                           const FamilyChoice& family,
                           const FitOptions& opt = {});

struct SrocCurve {
    double q = 0.5;
    bool x110_abscissa = true;  // regression of x111 on x110 when true
    std::vector<std::pair<double, double>> points;  // (x110, x111)
};

/// Copula quantile-regression curve at level q from a beta-margin fit under
/// the SROC decomposition.
SrocCurve sroc_curve(const FitResult& fit, double q, int grid_size = 200,
                     bool x110_abscissa = true);

struct PredictiveField {
    int grid_size = 0;
    std::vector<double> x110, x111;     // cell-midpoint coordinates
    std::vector<double> density;        // row-major, x111 fastest
    double pi110 = 0.0, pi111 = 0.0;    // summary point
};

/// Joint density of the latent (joint FPR, joint TPR) pair: edge copula
/// density times the two beta margin densities, on a midpoint grid.
PredictiveField predictive_region(const FitResult& fit, int grid_size = 200);

struct ObservedPoint {
    std::string study;
    double x110_hat = 0.0, x111_hat = 0.0;
};

/// Per-study observed proportions y110/n0 and y111/n1 for plot overlays;
/// studies with an empty arm are skipped.
std::vector<ObservedPoint> observed_points(const std::vector<StudyTable>& data);

}  // namespace vinemeta
