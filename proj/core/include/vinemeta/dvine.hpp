#pragma once

#include "vinemeta/copulas.hpp"
#include "vinemeta/quadrature.hpp"
#include "vinemeta/rng.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace vinemeta {

/// The six latent-variable labels y_{jkt}: test1 outcome j, test2 outcome k,
/// disease arm t.
enum class Label : int { L101 = 0, L011, L111, L100, L010, L110 };

inline constexpr std::array<Label, 6> kCanonicalLabels = {
    Label::L101, Label::L011, Label::L111, Label::L100, Label::L010, Label::L110};

int label_code(Label l);          // e.g. 101
Label label_from_code(int code);  // inverse
int label_arm(Label l);           // disease index t: 1 or 0
int label_cell(Label l);          // 0: (+-), 1: (-+), 2: (++)
std::string label_str(Label l);

using LabelOrder = std::array<Label, 6>;

inline constexpr LabelOrder kDefaultOrder = kCanonicalLabels;

/// Permutation used for the SROC refit: joint-TPR/joint-FPR first.
inline constexpr LabelOrder kSrocOrder = {Label::L111, Label::L110, Label::L101,
                                          Label::L011, Label::L100, Label::L010};

/// A level-1-truncated D-vine on the six latent variables: a decomposition
/// (label ordering) plus the five adjacent-pair copulas.
struct VineSpec {
    LabelOrder order = kDefaultOrder;
    std::array<PairCopula, 5> edges{};

    /// Position of each label in `order` (inverse permutation).
    std::array<int, 6> positions() const;
    void validate() const;
};

LabelOrder parse_order(const std::string& csv);  // "101,011,111,100,010,110"
std::string order_str(const LabelOrder& order);

/// c6(u) = product of the five adjacent-pair densities along `order`;
/// u is indexed by position in `order`.
double vine_density(const VineSpec& spec, const std::array<double, 6>& u);

/// Dependent quadrature grid: level k holds Nq^k values v^k indexed by the
/// flattened tuple (q1..qk), level-1 values being the raw nodes.  Levels 1-5
/// are materialized on both the uniform and normal-quantile scales; level 6
/// is streamed via level6_row.  Singular edges use the deterministic maps
/// v = u or v = 1-u, so the level's entries repeat across its last index.
class DependentGrid {
  public:
    DependentGrid(const VineSpec& spec, const QuadratureRule& rule);

    int nq() const { return nq_; }
    const QuadratureRule& rule() const { return rule_; }

    /// v-scale values of level k (1-based, k <= 5), Nq^k entries.
    const std::vector<double>& level_v(int k) const { return v_[k - 1]; }
    /// Phi^{-1} of the same values.
    const std::vector<double>& level_z(int k) const { return z_[k - 1]; }

    /// Fill the Nq level-6 values below level-5 entry `prefix`; out_z may be
    /// null when the caller only needs the uniform scale (and vice versa).
    void level6_row(std::size_t prefix, double* out_v, double* out_z) const;

  private:
    const VineSpec spec_;
    QuadratureRule rule_;
    int nq_;
    std::vector<double> node_z_;  // Phi^{-1} of the raw nodes
    std::array<std::vector<double>, 5> v_;
    std::array<std::vector<double>, 5> z_;
};

/// Draw n six-vectors of dependent uniforms; row[i] belongs to label
/// order[i].  Deterministic for a fixed seed.
std::vector<std::array<double, 6>> simulate(const VineSpec& spec, int n,
                                            std::uint64_t seed);
std::array<double, 6> simulate_one(const VineSpec& spec, Rng& rng);

/// The 360 reversal-equivalence classes of label orderings; the canonical
/// representative is the lexicographically smaller of a sequence and its
/// reverse, and the default order comes first.
std::vector<LabelOrder> enumerate_decompositions();

}  // namespace vinemeta
