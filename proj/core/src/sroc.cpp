#include "vinemeta/sroc.hpp"

#include <cmath>
#include <stdexcept>

namespace vinemeta {

namespace {

/// C with its arguments swapped; 90 and 270 rotations exchange roles,
/// everything else is exchangeable.
PairCopula swapped(const PairCopula& c) {
    switch (c.family()) {
        case CopulaFamily::Clayton90:
            return {CopulaFamily::Clayton270, c.theta()};
        case CopulaFamily::Clayton270:
            return {CopulaFamily::Clayton90, c.theta()};
        default:
            return c;
    }
}

struct SrocPieces {
    BetaMargin m111, m110;
    PairCopula edge;  // copula of (u111, u110)
};

SrocPieces pieces(const FitResult& fit) {
    const ModelParams& p = fit.params;
    if (p.margins != MarginFamily::Beta)
        throw std::domain_error("SROC output requires beta margins");
    if (p.order != kSrocOrder)
        throw std::domain_error(
            "SROC output requires a fit under the 111,110,... decomposition");
    SrocPieces out;
    out.m111 = {p.pi1.p11, p.disp1[2]};
    out.m110 = {p.pi0.p11, p.disp0[2]};
    out.edge = p.vine().edges[0];
    return out;
}

}  // namespace

FitResult sroc_permute_fit(const std::vector<StudyTable>& data,
                           const FamilyChoice& family, const FitOptions& opt) {
    return fit(data, MarginFamily::Beta, family, kSrocOrder, opt);
}

SrocCurve sroc_curve(const FitResult& fit, double q, int grid_size,
                     bool x110_abscissa) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must be in (0,1)");
    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    SrocPieces pc = pieces(fit);
    SrocCurve curve;
    curve.q = q;
    curve.x110_abscissa = x110_abscissa;
    curve.points.reserve(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        double x = (i + 1.0) / (grid_size + 1.0);
        if (x110_abscissa) {
            // x111 quantile given x110: condition on the second edge argument
            double u110 = beta_cdf(pc.m110, x);
            double u111 = swapped(pc.edge).inv_cond_cdf(q, u110);
            curve.points.emplace_back(x, beta_quantile(pc.m111, u111));
        } else {
            double u111 = beta_cdf(pc.m111, x);
            double u110 = pc.edge.inv_cond_cdf(q, u111);
            curve.points.emplace_back(beta_quantile(pc.m110, u110), x);
        }
    }
    return curve;
}

PredictiveField predictive_region(const FitResult& fit, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("grid_size must be >= 2");
    SrocPieces pc = pieces(fit);
    if (pc.edge.is_singular())
        throw std::domain_error("predictive region undefined for a boundary edge");
    PredictiveField field;
    field.grid_size = grid_size;
    field.pi110 = pc.m110.pi;
    field.pi111 = pc.m111.pi;
    field.x110.resize(grid_size);
    field.x111.resize(grid_size);
    for (int i = 0; i < grid_size; ++i) {
        field.x110[i] = (i + 0.5) / grid_size;
        field.x111[i] = (i + 0.5) / grid_size;
    }
    field.density.resize(static_cast<std::size_t>(grid_size) * grid_size);
    for (int i = 0; i < grid_size; ++i) {
        double x0 = field.x110[i];
        double u110 = beta_cdf(pc.m110, x0);
        double f110 = beta_pdf(pc.m110, x0);
        for (int j = 0; j < grid_size; ++j) {
            double x1 = field.x111[j];
            double u111 = beta_cdf(pc.m111, x1);
            field.density[static_cast<std::size_t>(i) * grid_size + j] =
                pc.edge.density(u111, u110) * beta_pdf(pc.m111, x1) * f110;
        }
    }
    return field;
}

std::vector<ObservedPoint> observed_points(const std::vector<StudyTable>& data) {
    std::vector<ObservedPoint> pts;
    for (const StudyTable& st : data) {
        if (st.n1() == 0 || st.n0() == 0) continue;
        pts.push_back({st.id, static_cast<double>(st.non_diseased[2]) / st.n0(),
                       static_cast<double>(st.diseased[2]) / st.n1()});
    }
    return pts;
}

}  // namespace vinemeta
