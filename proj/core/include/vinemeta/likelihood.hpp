#pragma once

#include "vinemeta/data.hpp"
#include "vinemeta/dvine.hpp"
#include "vinemeta/model.hpp"
#include "vinemeta/quadrature.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace vinemeta {

/// log M4(y | n, p) with p4 = 1 - p1 - p2 - p3.
double multinomial_logpmf(const std::array<long long, 4>& y,
                          const std::array<double, 3>& p);

struct LikelihoodError : std::runtime_error {
    LikelihoodError(const std::string& what, int study_index)
        : std::runtime_error(what), study(study_index) {}
    int study;  // offending study (index into the data list), -1 if global
};

struct LikelihoodOptions {
    int nq = kDefaultQuadSize;
    int threads = 1;  // 0: resolve from VINEMETA_THREADS / hardware
    /// Grid prefixes whose bounded contribution falls this far (in log units,
    /// before the lattice-size correction) below the best term are skipped.
    /// Non-positive disables pruning.
    double prune_log_margin = 60.0;
};

/// Evaluates the joint log-likelihood of the model over a fixed study list by
/// the dependent-grid sextuple sum.  The grid, margin-quantile splines, and
/// the inner (level 4-6) partial sums are cached across calls, keyed by the
/// parameters they actually depend on, which makes repeated evaluations that
/// perturb only a few parameters (finite-difference gradients) much cheaper.
///
/// Not thread-safe across concurrent loglik() calls on one instance; internal
/// work is parallelized per options.threads.
class LikelihoodEngine {
  public:
    LikelihoodEngine(std::vector<StudyTable> data, LikelihoodOptions opt = {});
    ~LikelihoodEngine();

    /// Sum over studies of log L_i.  Throws LikelihoodError when a study's
    /// contribution is non-finite.
    double loglik(const ModelParams& params);

    const std::vector<StudyTable>& data() const { return data_; }
    const LikelihoodOptions& options() const { return opt_; }

  private:
    struct Impl;
    std::vector<StudyTable> data_;
    LikelihoodOptions opt_;
    std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around LikelihoodEngine.
double joint_loglik(const ModelParams& params,
                    const std::vector<StudyTable>& data,
                    const QuadratureRule& rule);

}  // namespace vinemeta
