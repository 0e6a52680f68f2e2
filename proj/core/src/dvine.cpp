#include "vinemeta/dvine.hpp"

#include "vinemeta/normal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vinemeta {

namespace {
constexpr int kCodes[6] = {101, 11, 111, 100, 10, 110};
}

int label_code(Label l) { return kCodes[static_cast<int>(l)]; }

Label label_from_code(int code) {
    for (int i = 0; i < 6; ++i)
        if (kCodes[i] == code) return static_cast<Label>(i);
    throw std::invalid_argument("unknown label code " + std::to_string(code));
}

int label_arm(Label l) { return kCodes[static_cast<int>(l)] % 10; }

int label_cell(Label l) {
    switch (kCodes[static_cast<int>(l)] / 10) {
        case 10: return 0;
        case 1: return 1;
        default: return 2;
    }
}

std::string label_str(Label l) {
    int c = label_code(l);
    char buf[4] = {char('0' + c / 100), char('0' + (c / 10) % 10), char('0' + c % 10), 0};
    return buf;
}

std::array<int, 6> VineSpec::positions() const {
    std::array<int, 6> pos{};
    std::array<bool, 6> seen{};
    for (int i = 0; i < 6; ++i) {
        int l = static_cast<int>(order[i]);
        if (seen[l]) throw std::invalid_argument("VineSpec: duplicate label in order");
        seen[l] = true;
        pos[l] = i;
    }
    return pos;
}

void VineSpec::validate() const { (void)positions(); }

LabelOrder parse_order(const std::string& csv) {
    std::stringstream ss(csv);
    std::string item;
    std::vector<int> codes;
    while (std::getline(ss, item, ',')) codes.push_back(std::stoi(item));
    if (codes.size() != 6)
        throw std::invalid_argument("permutation must list six labels");
    LabelOrder order;
    for (int i = 0; i < 6; ++i) order[i] = label_from_code(codes[i]);
    VineSpec tmp;
    tmp.order = order;
    tmp.validate();
    return order;
}

std::string order_str(const LabelOrder& order) {
    std::string s;
    for (int i = 0; i < 6; ++i) {
        if (i) s += ',';
        s += label_str(order[i]);
    }
    return s;
}

double vine_density(const VineSpec& spec, const std::array<double, 6>& u) {
    double d = 1.0;
    for (int k = 0; k < 5; ++k) d *= spec.edges[k].density(u[k], u[k + 1]);
    return d;
}

DependentGrid::DependentGrid(const VineSpec& spec, const QuadratureRule& rule)
    : spec_(spec), rule_(rule), nq_(rule.size()) {
    spec_.validate();
    node_z_.resize(nq_);
    for (int q = 0; q < nq_; ++q) node_z_[q] = norm_quantile(rule_.nodes[q]);

    v_[0] = rule_.nodes;
    z_[0] = node_z_;
    for (int k = 1; k < 5; ++k) {
        const auto& pv = v_[k - 1];
        const auto& pz = z_[k - 1];
        std::size_t np = pv.size();
        v_[k].resize(np * nq_);
        z_[k].resize(np * nq_);
        const PairCopula& edge = spec_.edges[k - 1];
        const bool bvn = edge.family() == CopulaFamily::BVN;
        const double rho = edge.theta();
        const double s = bvn ? std::sqrt((1.0 - rho) * (1.0 + rho)) : 0.0;
        for (std::size_t p = 0; p < np; ++p) {
            double* vr = v_[k].data() + p * nq_;
            double* zr = z_[k].data() + p * nq_;
            if (bvn) {
                for (int q = 0; q < nq_; ++q) {
                    zr[q] = rho * pz[p] + s * node_z_[q];
                    vr[q] = norm_cdf(zr[q]);
                }
            } else {
                for (int q = 0; q < nq_; ++q) {
                    vr[q] = edge.inv_cond_cdf(rule_.nodes[q], pv[p]);
                    zr[q] = norm_quantile(vr[q]);
                }
            }
        }
    }
}

void DependentGrid::level6_row(std::size_t prefix, double* out_v, double* out_z) const {
    const PairCopula& edge = spec_.edges[4];
    if (edge.family() == CopulaFamily::BVN) {
        const double rho = edge.theta();
        const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
        double zp = z_[4][prefix];
        for (int q = 0; q < nq_; ++q) {
            double z = rho * zp + s * node_z_[q];
            if (out_z) out_z[q] = z;
            if (out_v) out_v[q] = norm_cdf(z);
        }
    } else {
        double vp = v_[4][prefix];
        for (int q = 0; q < nq_; ++q) {
            double v = edge.inv_cond_cdf(rule_.nodes[q], vp);
            if (out_v) out_v[q] = v;
            if (out_z) out_z[q] = norm_quantile(v);
        }
    }
}

std::array<double, 6> simulate_one(const VineSpec& spec, Rng& rng) {
    std::array<double, 6> u;
    u[0] = rng.uniform();
    for (int k = 1; k < 6; ++k) u[k] = spec.edges[k - 1].inv_cond_cdf(rng.uniform(), u[k - 1]);
    return u;
}

std::vector<std::array<double, 6>> simulate(const VineSpec& spec, int n,
                                            std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::vector<std::array<double, 6>> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(simulate_one(spec, rng));
    return out;
}

std::vector<LabelOrder> enumerate_decompositions() {
    std::array<int, 6> idx = {0, 1, 2, 3, 4, 5};
    std::vector<LabelOrder> out;
    out.reserve(360);
    do {
        std::array<int, 6> rev;
        for (int i = 0; i < 6; ++i) rev[i] = idx[5 - i];
        if (idx <= rev) {
            LabelOrder o;
            for (int i = 0; i < 6; ++i) o[i] = kCanonicalLabels[idx[i]];
            out.push_back(o);
        }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
}

}  // namespace vinemeta
