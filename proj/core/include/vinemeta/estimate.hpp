#pragma once

#include "vinemeta/likelihood.hpp"
#include "vinemeta/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace vinemeta {

struct FitOptions {
    int nq = kDefaultQuadSize;
    int threads = 1;
    int max_iter = 300;
    double grad_tol = 1e-5;   // sup-norm of the gradient
    double rel_tol = 1e-9;    // relative objective change
    double tau_cap = 0.95;    // dependence boundary
    // The likelihood can be multimodal in the dependence parameters; when
    // enabled, short screening runs from alternative tau starts pick the
    // basin before the full optimisation.
    bool multistart = true;
};

struct FitResult {
    ModelParams params;
    double neg_loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    int n_eval = 0;
    double grad_norm = 0.0;

    bool se_available = false;
    std::array<double, 3> se_pi1{}, se_pi0{}, se_disp1{}, se_disp0{};
    std::array<double, 5> se_tau{};  // NaN for boundary-replaced / fixed edges
    std::array<double, 4> derived{}, se_derived{};

    std::string error;  // nonempty when the fit failed outright
};

/// Bijection between ModelParams and an unconstrained vector: probability
/// triplets via the multinomial logit, sigma via log, gamma via logit, and
/// each free edge's tau via a tanh map onto the family span capped at
/// +-tau_cap.  Boundary-replaced and degenerate (independence) edges carry
/// no coordinate.
class ParamPacker {
  public:
    ParamPacker(const ModelParams& shape, double tau_cap = 0.95);

    int dim() const { return dim_; }
    std::vector<double> pack(const ModelParams& p) const;
    ModelParams unpack(const std::vector<double>& x) const;
    /// Coordinate index of edge k's tau, -1 when fixed.
    int tau_index(int k) const { return edges_[k].idx; }

  private:
    ModelParams shape_;
    struct EdgeSlot {
        int idx = -1;
        double lo = 0.0, hi = 0.0;
    };
    std::array<EdgeSlot, 5> edges_{};
    int dim_ = 0;
};

/// Moment-based starting values: pooled cell proportions, sigma = 0.5 or
/// gamma = 0.1, all taus 0.
ModelParams initial_params(const std::vector<StudyTable>& data,
                           MarginFamily margins, const FamilyChoice& family,
                           const LabelOrder& order = kDefaultOrder);

/// Quasi-Newton (BFGS, numerical central-difference gradients) maximum
/// likelihood from an explicit start.  Edges whose fitted |tau| reaches
/// tau_cap - 1e-3 are replaced by the matching Frechet-bound copula and the
/// remaining parameters re-optimized; such edges report no tau SE.
FitResult fit(const std::vector<StudyTable>& data, const ModelParams& start,
              const FitOptions& opt = {});
FitResult fit(const std::vector<StudyTable>& data, MarginFamily margins,
              const FamilyChoice& family, const LabelOrder& order = kDefaultOrder,
              const FitOptions& opt = {});

/// Default family menu used by model selection.
extern const std::vector<std::string> kDefaultFamilyMenu;

struct SelectEntry {
    std::string family;
    MarginFamily margins;
    FitResult result;
    bool ok = false;
};

/// Fit every (family, margin) candidate and rank by negative log-likelihood
/// (failures ranked last).  Candidates run concurrently.
std::vector<SelectEntry> model_select(const std::vector<StudyTable>& data,
                                      const std::vector<std::string>& families,
                                      const std::vector<MarginFamily>& margins,
                                      const LabelOrder& order = kDefaultOrder,
                                      const FitOptions& opt = {});

}  // namespace vinemeta
