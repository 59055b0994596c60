#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qdport/behavior.hpp"
#include "qdport/core.hpp"

namespace qdport {

enum class FitnessKind { f1, f2 };

std::string_view to_string(FitnessKind kind) noexcept;
FitnessKind parse_fitness(std::string_view text);

struct QdConfig {
    std::size_t niches = 200;         // M
    std::size_t n_max = 250'000;      // evaluation budget, initialization included
    std::size_t n_cvt = 10'000;       // CVT training samples
    double p_init = 0.1;              // fraction of niches filled by random sampling
    double mutation = 0.05;           // m
    double c = 0.1;                   // near-optimality constant
    FitnessKind fitness = FitnessKind::f2;
    BehaviorKind behavior = BehaviorKind::b1;
    SimplexSampler cvt_sampler = SimplexSampler::dirichlet;
    std::uint64_t seed = 0;
    double rf = 0.0;
    std::size_t batch = 0;            // 0: sequential; otherwise generation size
    unsigned threads = 1;
    std::size_t snapshot_every = 10'000;

    void validate() const;
};

struct EliteRecord {
    Portfolio w;
    BehaviorDescriptor bd;
    double fitness = 0.0;
    RiskReturnPoint rr;
    bool near_optimal = false;
};

/// One elite per CVT niche.
class Archive {
public:
    Archive() = default;
    explicit Archive(CvtPartition partition);

    [[nodiscard]] const CvtPartition& partition() const noexcept { return partition_; }
    [[nodiscard]] std::size_t niches() const noexcept { return slots_.size(); }
    [[nodiscard]] std::size_t occupied() const noexcept { return filled_.size(); }
    [[nodiscard]] const std::optional<EliteRecord>& slot(std::size_t niche) const { return slots_.at(niche); }
    /// Occupied niche indices in order of first fill.
    [[nodiscard]] const std::vector<std::size_t>& filled() const noexcept { return filled_; }

    /// Inserts when the niche is empty or the record is strictly fitter.
    bool try_insert(std::size_t niche, EliteRecord record);
    /// Same, with the niche taken from the record's descriptor.
    bool try_insert(EliteRecord record);

    [[nodiscard]] std::size_t eval_count() const noexcept { return evals_; }
    void set_eval_count(std::size_t n) noexcept { evals_ = n; }
    void count_evaluation() noexcept { ++evals_; }

private:
    CvtPartition partition_;
    std::vector<std::optional<EliteRecord>> slots_;
    std::vector<std::size_t> filled_;
    std::size_t evals_ = 0;
};

/// μ ≥ (1-c)μ0 and σ ≤ (1+c)σ0, boundaries included.
bool in_region(const RiskReturnPoint& rr, const RiskReturnPoint& rr0, double c);

/// Negative Euclidean distance between risk-return points.
double fitness1(const RiskReturnPoint& rr, const RiskReturnPoint& rr0);
double fitness1(const Portfolio& w, const Portfolio& w0, const Estimates& est);
/// Weight-space distance from w0 inside the region, fitness1 outside.
double fitness2(const Portfolio& w, const Portfolio& w0, const Estimates& est, double c);

inline constexpr int kRecombineAttempts = 16;

/// clip(λ w1 + (1-λ) w2 + δ, 0, 1) normalized; nullopt when everything clips to 0.
std::optional<Portfolio> recombine_with(std::span<const double> w1, std::span<const double> w2,
                                        double lambda, std::span<const double> delta);
/// Draws λ ~ U[0,1] then δ ~ U[-m,m]^N; retries up to 16 times, then equal weight.
Portfolio recombine(const Portfolio& w1, const Portfolio& w2, double m, Rng& rng);

/// Scores candidates against a fixed reference.
class Evaluator {
public:
    Evaluator(const Estimates& est, BehaviorMap behavior, const CvtPartition& partition, Portfolio w0,
              double c, FitnessKind fitness);

    [[nodiscard]] std::pair<std::size_t, EliteRecord> evaluate(Portfolio w) const;
    [[nodiscard]] const Portfolio& reference() const noexcept { return w0_; }
    [[nodiscard]] const RiskReturnPoint& reference_point() const noexcept { return rr0_; }

private:
    const Estimates& est_;
    BehaviorMap behavior_;
    const CvtPartition& partition_;
    Portfolio w0_;
    RiskReturnPoint rr0_;
    double c_;
    FitnessKind fitness_;
};

struct Snapshot {
    std::size_t evals = 0;
    std::size_t occupied = 0;
    double coverage = 0.0;
    double qd_score1 = 0.0;
    double qd_score_mod = 0.0;
};

struct Replacement {
    std::size_t eval = 0;
    std::size_t niche = 0;
    std::optional<double> previous;
    double fitness = 0.0;
};

struct RunOptions {
    bool audit = false;
    /// Optional progress hook, called at every snapshot.
    std::function<void(const Snapshot&)> on_snapshot;
};

struct QdResult {
    Archive archive;
    Portfolio w0;
    RiskReturnPoint rr0;
    std::vector<Snapshot> snapshots;
    std::vector<Replacement> audit;
};

/// CVT-MAP-Elites. `universe` is required for B2 and ignored for B1.
///
/// A single engine seeded with cfg.seed is consumed in this order: CVT
/// samples, k-means++ seeding, initialization portfolios, then per offspring
/// the two parent picks, λ and δ (repeated on a clipped-to-zero retry).
QdResult run_qd(const QdConfig& cfg, const Estimates& est, const AssetUniverse* universe,
                const Portfolio& w0, const RunOptions& options = {});

/// Same loop over a prebuilt partition; `rng` continues from wherever it is.
QdResult run_qd(const QdConfig& cfg, const Estimates& est, const AssetUniverse* universe,
                const Portfolio& w0, CvtPartition partition, Rng& rng, const RunOptions& options = {});

Snapshot take_snapshot(const Archive& archive);

}  // namespace qdport
