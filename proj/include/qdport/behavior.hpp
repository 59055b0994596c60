#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdport/core.hpp"

namespace qdport {

/// The one engine every stochastic routine draws from.
using Rng = std::mt19937_64;

/// Uniform draw from the unit simplex (symmetric Dirichlet with all alphas 1).
void sample_simplex(Rng& rng, std::span<double> out);
Portfolio sample_portfolio(Rng& rng, std::size_t n);

/// How CVT training portfolios are drawn: uniformly on the simplex, or as
/// uniform [0,1]^N vectors divided by their sum (denser near the centre).
enum class SimplexSampler { dirichlet, cube };

std::string_view to_string(SimplexSampler s) noexcept;
SimplexSampler parse_sampler(std::string_view text);
void sample_simplex(Rng& rng, std::span<double> out, SimplexSampler sampler);

enum class BehaviorKind { b1, b2 };

std::string_view to_string(BehaviorKind kind) noexcept;
BehaviorKind parse_behavior(std::string_view text);

struct BehaviorDescriptor {
    std::vector<double> values;
};

/// Weights, unchanged.
BehaviorDescriptor behavior_b1(const Portfolio& w);
/// Sector exposures followed by cap-weighted market cap over the largest cap.
BehaviorDescriptor behavior_b2(const Portfolio& w, const AssetUniverse& u);

/// Maps portfolios into a behavior space without allocating.
class BehaviorMap {
public:
    /// B1 over n assets.
    explicit BehaviorMap(std::size_t n_assets);
    /// B2 over the universe's sectors and caps.
    explicit BehaviorMap(const AssetUniverse& universe);

    [[nodiscard]] BehaviorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t assets() const noexcept { return n_assets_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    void describe(std::span<const double> w, std::span<double> out) const;
    [[nodiscard]] BehaviorDescriptor operator()(const Portfolio& w) const;

private:
    BehaviorKind kind_;
    std::size_t n_assets_;
    std::size_t dim_;
    std::vector<int> sector_of_;
    std::vector<double> cap_scaled_;  // cap_j / max cap
};

/// Niches of a centroidal Voronoi tessellation of behavior space.
class CvtPartition {
public:
    CvtPartition() = default;
    /// `centroids` is row-major M×d.
    CvtPartition(std::vector<double> centroids, std::size_t dim, BehaviorKind kind, std::uint64_t seed);

    [[nodiscard]] std::size_t niches() const noexcept { return niches_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] BehaviorKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::span<const double> centroid(std::size_t i) const {
        return {centroids_.data() + i * dim_, dim_};
    }
    [[nodiscard]] const std::vector<double>& centroids() const noexcept { return centroids_; }

    /// Nearest centroid by Euclidean distance, lowest index on ties.
    [[nodiscard]] std::size_t niche_index(std::span<const double> bd) const;
    [[nodiscard]] std::size_t niche_index(const BehaviorDescriptor& bd) const { return niche_index(bd.values); }

    bool operator==(const CvtPartition& o) const {
        return centroids_ == o.centroids_ && dim_ == o.dim_ && kind_ == o.kind_ && seed_ == o.seed_;
    }

private:
    std::vector<double> centroids_;
    std::vector<double> lanes_;  // centroids in kernel lane layout
    std::size_t niches_ = 0;
    std::size_t dim_ = 0;
    std::size_t stride_ = 0;
    BehaviorKind kind_ = BehaviorKind::b1;
    std::uint64_t seed_ = 0;
};

struct KMeansResult {
    std::vector<double> centroids;  // row-major k×d
    std::vector<std::size_t> labels;
    int iterations = 0;
    bool converged = false;
};

inline constexpr int kKMeansMaxIterations = 300;
inline constexpr double kKMeansShiftTolerance = 1e-8;

/// k-means++ seeding then Lloyd iterations (Hamerly bounds) until the largest
/// centroid shift drops below 1e-8 or 300 iterations. Labels are the exact
/// nearest-centroid assignment against the returned centroids.
/// Throws DataError when k exceeds the number of distinct points.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k, Rng& rng);

/// Samples n_cvt portfolios, maps them through `behavior`, clusters.
CvtPartition build_cvt(const BehaviorMap& behavior, std::size_t niches, std::size_t n_cvt, Rng& rng,
                       std::uint64_t seed_tag, SimplexSampler sampler = SimplexSampler::dirichlet);
CvtPartition build_cvt(const BehaviorMap& behavior, std::size_t niches, std::size_t n_cvt,
                       std::uint64_t seed, SimplexSampler sampler = SimplexSampler::dirichlet);

}  // namespace qdport
