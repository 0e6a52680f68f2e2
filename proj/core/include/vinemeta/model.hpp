#pragma once

#include "vinemeta/copulas.hpp"
#include "vinemeta/dvine.hpp"
#include "vinemeta/margins.hpp"

#include <array>

namespace vinemeta {

enum class MarginFamily { Normal, Beta };

MarginFamily parse_margin_family(const std::string& name);  // "normal" | "beta"
std::string margin_family_name(MarginFamily m);

/// Full parameter set of the multinomial truncated D-vine copula mixed model.
/// `pi1`/`pi0` are the joint cell means per arm; `disp*` holds sigma (normal
/// margins) or gamma (beta margins) per cell; `taus` are the five edge
/// Kendall taus with their family choices.  `boundary` marks edges replaced
/// by a Frechet bound (+1 comonotonic, -1 countermonotonic, 0 none).
struct ModelParams {
    MarginFamily margins = MarginFamily::Normal;
    ProbTriplet pi1{}, pi0{};
    std::array<double, 3> disp1{}, disp0{};  // indexed by cell (+-, -+, ++)
    std::array<double, 5> taus{};
    std::array<FamilyChoice, 5> families{};
    std::array<int, 5> boundary{};
    LabelOrder order = kDefaultOrder;

    const ProbTriplet& pi(int arm) const { return arm == 1 ? pi1 : pi0; }
    const std::array<double, 3>& disp(int arm) const {
        return arm == 1 ? disp1 : disp0;
    }

    /// Edge copulas resolved from taus / family branches / boundary flags.
    VineSpec vine() const;

    void validate() const;
};

ModelParams default_params(MarginFamily margins, const FamilyChoice& family,
                           const LabelOrder& order = kDefaultOrder);

/// Per-position margin descriptors under params.order.  For beta margins the
/// mean of position i is the conditional mean of its arm's cell triplet taken
/// in appearance order; for normal margins it is the corresponding
/// multinomial-logit component.
struct PositionMargin {
    MarginFamily family;
    NormalMargin normal;
    BetaMargin beta;
};

std::array<PositionMargin, 6> position_margins(const ModelParams& params);

/// (TPR test1, TPR test2, FPR test1, FPR test2) =
/// (pi101+pi111, pi011+pi111, pi100+pi110, pi010+pi110).
std::array<double, 4> derived_accuracy(const ModelParams& params);

}  // namespace vinemeta
