#include "vinemeta/model.hpp"

#include <cmath>
#include <stdexcept>

namespace vinemeta {

MarginFamily parse_margin_family(const std::string& name) {
    if (name == "normal") return MarginFamily::Normal;
    if (name == "beta") return MarginFamily::Beta;
    throw std::invalid_argument("unknown margin family: " + name);
}

std::string margin_family_name(MarginFamily m) {
    return m == MarginFamily::Normal ? "normal" : "beta";
}

VineSpec ModelParams::vine() const {
    VineSpec spec;
    spec.order = order;
    for (int k = 0; k < 5; ++k) {
        if (boundary[k] > 0)
            spec.edges[k] = PairCopula(CopulaFamily::Comonotonic);
        else if (boundary[k] < 0)
            spec.edges[k] = PairCopula(CopulaFamily::Countermonotonic);
        else
            spec.edges[k] = copula_from_tau(families[k].branch(taus[k]), taus[k]);
    }
    return spec;
}

void ModelParams::validate() const {
    if (!pi1.valid() || !pi0.valid())
        throw std::domain_error("ModelParams: cell means must be interior to the simplex");
    for (int j = 0; j < 3; ++j) {
        bool ok = margins == MarginFamily::Normal
                      ? (disp1[j] > 0.0 && disp0[j] > 0.0)
                      : (disp1[j] > 0.0 && disp1[j] < 1.0 && disp0[j] > 0.0 &&
                         disp0[j] < 1.0);
        if (!ok) throw std::domain_error("ModelParams: variability parameter out of range");
    }
    for (int k = 0; k < 5; ++k) {
        if (boundary[k] != 0) continue;
        auto [lo, hi] = families[k].tau_span();
        if (taus[k] < lo || taus[k] > hi)
            throw std::domain_error("ModelParams: tau outside the family span");
    }
    VineSpec spec;
    spec.order = order;
    spec.validate();
}

ModelParams default_params(MarginFamily margins, const FamilyChoice& family,
                           const LabelOrder& order) {
    ModelParams p;
    p.margins = margins;
    p.order = order;
    p.pi1 = {0.1, 0.1, 0.2};
    p.pi0 = {0.05, 0.05, 0.05};
    double d = margins == MarginFamily::Normal ? 0.5 : 0.1;
    p.disp1 = {d, d, d};
    p.disp0 = {d, d, d};
    for (int k = 0; k < 5; ++k) {
        p.families[k] = family;
        p.taus[k] = 0.0;
    }
    return p;
}

std::array<PositionMargin, 6> position_margins(const ModelParams& params) {
    std::array<PositionMargin, 6> out;
    for (int arm : {1, 0}) {
        // The arm's labels in appearance order define the conditioning order.
        std::array<int, 3> pos{}, cell{};
        int m = 0;
        for (int i = 0; i < 6; ++i) {
            if (label_arm(params.order[i]) != arm) continue;
            pos[m] = i;
            cell[m] = label_cell(params.order[i]);
            ++m;
        }
        if (m != 3) throw std::domain_error("order must contain three labels per arm");
        const ProbTriplet& pi = params.pi(arm);
        const auto& disp = params.disp(arm);
        if (params.margins == MarginFamily::Normal) {
            auto x = mlogit(pi);
            for (int j = 0; j < 3; ++j) {
                out[pos[j]].family = MarginFamily::Normal;
                out[pos[j]].normal = {x[cell[j]], disp[cell[j]]};
            }
        } else {
            ProbTriplet reordered{pi[cell[0]], pi[cell[1]], pi[cell[2]]};
            auto means = conditional_from_joint(reordered);
            for (int j = 0; j < 3; ++j) {
                out[pos[j]].family = MarginFamily::Beta;
                out[pos[j]].beta = {means[j], disp[cell[j]]};
            }
        }
    }
    return out;
}

std::array<double, 4> derived_accuracy(const ModelParams& params) {
    return {params.pi1.p10 + params.pi1.p11, params.pi1.p01 + params.pi1.p11,
            params.pi0.p10 + params.pi0.p11, params.pi0.p01 + params.pi0.p11};
}

}  // namespace vinemeta
