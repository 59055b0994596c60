#include "qdport/behavior.hpp"

#include <algorithm>

namespace qdport {

void sample_simplex(Rng& rng, std::span<double> out) {
    std::exponential_distribution<double> expo(1.0);
    double sum = 0.0;
    for (double& x : out) {
        x = expo(rng);
        sum += x;
    }
    for (double& x : out) x /= sum;
}

void sample_simplex(Rng& rng, std::span<double> out, SimplexSampler sampler) {
    if (sampler == SimplexSampler::dirichlet) {
        sample_simplex(rng, out);
        return;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double sum = 0.0;
    while (!(sum > 0.0)) {
        sum = 0.0;
        for (double& x : out) {
            x = unit(rng);
            sum += x;
        }
    }
    for (double& x : out) x /= sum;
}

std::string_view to_string(SimplexSampler s) noexcept { return s == SimplexSampler::cube ? "cube" : "dirichlet"; }

SimplexSampler parse_sampler(std::string_view text) {
    if (text == "dirichlet") return SimplexSampler::dirichlet;
    if (text == "cube") return SimplexSampler::cube;
    throw DataError("unknown CVT sampler '" + std::string(text) + "', expected dirichlet or cube");
}

Portfolio sample_portfolio(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    sample_simplex(rng, w);
    return Portfolio(std::move(w));
}

std::string_view to_string(BehaviorKind kind) noexcept { return kind == BehaviorKind::b1 ? "B1" : "B2"; }

BehaviorKind parse_behavior(std::string_view text) {
    if (text == "B1" || text == "b1") return BehaviorKind::b1;
    if (text == "B2" || text == "b2") return BehaviorKind::b2;
    throw DataError("unknown behavior '" + std::string(text) + "', expected B1 or B2");
}

BehaviorDescriptor behavior_b1(const Portfolio& w) { return {w.vec()}; }

BehaviorDescriptor behavior_b2(const Portfolio& w, const AssetUniverse& u) {
    return BehaviorMap(u)(w);
}

BehaviorMap::BehaviorMap(std::size_t n_assets)
    : kind_(BehaviorKind::b1), n_assets_(n_assets), dim_(n_assets) {}

BehaviorMap::BehaviorMap(const AssetUniverse& universe)
    : kind_(BehaviorKind::b2),
      n_assets_(universe.size()),
      dim_(static_cast<std::size_t>(universe.sectors) + 1),
      sector_of_(universe.sector_of) {
    universe.validate();
    const double top = universe.max_cap();
    cap_scaled_.reserve(n_assets_);
    for (double cap : universe.market_cap) cap_scaled_.push_back(cap / top);
}

void BehaviorMap::describe(std::span<const double> w, std::span<double> out) const {
    if (w.size() != n_assets_ || out.size() != dim_)
        throw DataError("behavior: portfolio or descriptor dimension mismatch");
    if (kind_ == BehaviorKind::b1) {
        std::copy(w.begin(), w.end(), out.begin());
        return;
    }
    const std::size_t sectors = dim_ - 1;
    std::fill(out.begin(), out.end(), 0.0);
    double cap = 0.0;
    for (std::size_t j = 0; j < n_assets_; ++j) {
        out[static_cast<std::size_t>(sector_of_[j])] += w[j];
        cap += w[j] * cap_scaled_[j];
    }
    out[sectors] = cap;
}

BehaviorDescriptor BehaviorMap::operator()(const Portfolio& w) const {
    BehaviorDescriptor bd{std::vector<double>(dim_)};
    describe(w.weights(), bd.values);
    return bd;
}

}  // namespace qdport
