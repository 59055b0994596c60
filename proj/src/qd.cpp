#include "qdport/qd.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "qdport/analytics.hpp"

namespace qdport {

std::string_view to_string(FitnessKind kind) noexcept { return kind == FitnessKind::f1 ? "F1" : "F2"; }

FitnessKind parse_fitness(std::string_view text) {
    if (text == "F1" || text == "f1" || text == "fitness1") return FitnessKind::f1;
    if (text == "F2" || text == "f2" || text == "fitness2") return FitnessKind::f2;
    throw DataError("unknown fitness '" + std::string(text) + "', expected F1 or F2");
}

void QdConfig::validate() const {
    if (niches < 1) throw DataError("config: M must be >= 1");
    if (n_max < 1) throw DataError("config: n_max must be >= 1");
    if (n_cvt < niches) throw DataError("config: n_cvt must be >= M");
    if (!(p_init > 0.0 && p_init <= 1.0)) throw DataError("config: p_init must be in (0, 1]");
    if (!(mutation >= 0.0)) throw DataError("config: mutation rate must be >= 0");
    if (!(c > 0.0 && c < 1.0)) throw DataError("config: c must be in (0, 1)");
    if (threads < 1) throw DataError("config: threads must be >= 1");
    if (snapshot_every < 1) throw DataError("config: snapshot_every must be >= 1");
}

Archive::Archive(CvtPartition partition)
    : partition_(std::move(partition)), slots_(partition_.niches()) {}

bool Archive::try_insert(std::size_t niche, EliteRecord record) {
    auto& slot = slots_.at(niche);
    if (!slot) {
        slot = std::move(record);
        filled_.push_back(niche);
        return true;
    }
    if (record.fitness > slot->fitness) {
        slot = std::move(record);
        return true;
    }
    return false;
}

bool Archive::try_insert(EliteRecord record) {
    const std::size_t niche = partition_.niche_index(record.bd);
    return try_insert(niche, std::move(record));
}

bool in_region(const RiskReturnPoint& rr, const RiskReturnPoint& rr0, double c) {
    return rr.mu >= (1.0 - c) * rr0.mu && rr.sigma <= (1.0 + c) * rr0.sigma;
}

double fitness1(const RiskReturnPoint& rr, const RiskReturnPoint& rr0) {
    return -std::hypot(rr0.mu - rr.mu, rr0.sigma - rr.sigma);
}

double fitness1(const Portfolio& w, const Portfolio& w0, const Estimates& est) {
    return fitness1(risk_return(w, est), risk_return(w0, est));
}

namespace {

double weight_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace

double fitness2(const Portfolio& w, const Portfolio& w0, const Estimates& est, double c) {
    if (w.size() != w0.size()) throw DataError("fitness2: dimension mismatch");
    const RiskReturnPoint rr = risk_return(w, est);
    const RiskReturnPoint rr0 = risk_return(w0, est);
    if (in_region(rr, rr0, c)) return weight_distance(w.weights(), w0.weights());
    return fitness1(rr, rr0);
}

std::optional<Portfolio> recombine_with(std::span<const double> w1, std::span<const double> w2,
                                        double lambda, std::span<const double> delta) {
    const std::size_t n = w1.size();
    if (w2.size() != n || delta.size() != n) throw DataError("recombine: parent dimension mismatch");
    std::vector<double> child(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        child[i] = std::clamp(lambda * w1[i] + (1.0 - lambda) * w2[i] + delta[i], 0.0, 1.0);
        sum += child[i];
    }
    if (!(sum > 0.0)) return std::nullopt;
    for (double& x : child) x /= sum;
    return Portfolio(std::move(child));
}

Portfolio recombine(const Portfolio& w1, const Portfolio& w2, double m, Rng& rng) {
    if (!(m >= 0.0)) throw DataError("recombine: mutation rate must be >= 0");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> noise(-m, m);
    std::vector<double> delta(w1.size());
    for (int attempt = 0; attempt < kRecombineAttempts; ++attempt) {
        const double lambda = unit(rng);
        for (double& d : delta) d = m > 0.0 ? noise(rng) : 0.0;
        if (auto child = recombine_with(w1.weights(), w2.weights(), lambda, delta)) return *std::move(child);
    }
    return Portfolio::equal_weight(w1.size());
}

Evaluator::Evaluator(const Estimates& est, BehaviorMap behavior, const CvtPartition& partition,
                     Portfolio w0, double c, FitnessKind fitness)
    : est_(est),
      behavior_(std::move(behavior)),
      partition_(partition),
      w0_(std::move(w0)),
      rr0_(risk_return(w0_, est)),
      c_(c),
      fitness_(fitness) {
    if (behavior_.dim() != partition_.dim())
        throw DataError("evaluator: behavior dimension does not match partition");
}

std::pair<std::size_t, EliteRecord> Evaluator::evaluate(Portfolio w) const {
    EliteRecord rec;
    rec.rr = risk_return(w, est_);
    rec.near_optimal = in_region(rec.rr, rr0_, c_);
    if (fitness_ == FitnessKind::f2 && rec.near_optimal)
        rec.fitness = weight_distance(w.weights(), w0_.weights());
    else
        rec.fitness = fitness1(rec.rr, rr0_);
    rec.bd = behavior_(w);
    rec.w = std::move(w);
    const std::size_t niche = partition_.niche_index(rec.bd);
    return {niche, std::move(rec)};
}

Snapshot take_snapshot(const Archive& archive) {
    Snapshot s;
    s.evals = archive.eval_count();
    s.occupied = archive.occupied();
    s.coverage = modified_coverage(archive);
    if (archive.occupied() > 0) {
        const QdScores q = qd_scores(archive);
        s.qd_score1 = q.qd_score1;
        s.qd_score_mod = q.qd_score_mod;
    }
    return s;
}

namespace {

BehaviorMap make_behavior(const QdConfig& cfg, const Estimates& est, const AssetUniverse* universe) {
    if (cfg.behavior == BehaviorKind::b1) return BehaviorMap(est.size());
    if (!universe) throw DataError("qd-run: behavior B2 needs an asset universe");
    if (universe->size() != est.size())
        throw DataError("qd-run: universe and estimates disagree on asset count");
    return BehaviorMap(*universe);
}

class Runner {
public:
    Runner(const QdConfig& cfg, const Evaluator& eval, Archive& archive, Rng& rng,
           const RunOptions& options, QdResult& result)
        : cfg_(cfg), eval_(eval), archive_(archive), rng_(rng), options_(options), result_(result) {}

    void initialize() {
        const auto target = static_cast<std::size_t>(
            std::ceil(cfg_.p_init * static_cast<double>(archive_.niches()) - 1e-12));
        const std::size_t n = eval_.reference().size();
        while (archive_.occupied() < target) {
            if (archive_.eval_count() >= cfg_.n_max) {
                throw DataError("qd-run: budget exhausted during initialization with " +
                                std::to_string(archive_.occupied()) + " of " +
                                std::to_string(archive_.niches()) + " niches filled (need " +
                                std::to_string(target) + ")");
            }
            commit(eval_.evaluate(sample_portfolio(rng_, n)));
        }
    }

    void evolve_sequential() {
        while (archive_.eval_count() < cfg_.n_max) commit(eval_.evaluate(offspring()));
    }

    void evolve_batched() {
        const std::size_t batch = cfg_.batch;
        std::vector<Portfolio> children;
        std::vector<std::pair<std::size_t, EliteRecord>> scored;
        while (archive_.eval_count() < cfg_.n_max) {
            const std::size_t b = std::min(batch, cfg_.n_max - archive_.eval_count());
            children.clear();
            for (std::size_t i = 0; i < b; ++i) children.push_back(offspring());
            scored.assign(b, {});
            const std::size_t workers = std::min<std::size_t>(cfg_.threads, b);
            if (workers <= 1) {
                for (std::size_t i = 0; i < b; ++i) scored[i] = eval_.evaluate(std::move(children[i]));
            } else {
                std::vector<std::jthread> pool;
                for (std::size_t t = 0; t < workers; ++t) {
                    pool.emplace_back([&, t] {
                        for (std::size_t i = t; i < b; i += workers)
                            scored[i] = eval_.evaluate(std::move(children[i]));
                    });
                }
            }
            for (auto& s : scored) commit(std::move(s));
        }
    }

    void finish() {
        if (result_.snapshots.empty() || result_.snapshots.back().evals != archive_.eval_count())
            record_snapshot();
    }

private:
    Portfolio offspring() {
        const auto& filled = archive_.filled();
        std::uniform_int_distribution<std::size_t> pick(0, filled.size() - 1);
        const std::size_t a = filled[pick(rng_)];
        const std::size_t b = filled[pick(rng_)];
        return recombine(archive_.slot(a)->w, archive_.slot(b)->w, cfg_.mutation, rng_);
    }

    void commit(std::pair<std::size_t, EliteRecord> scored) {
        auto& [niche, rec] = scored;
        archive_.count_evaluation();
        std::optional<double> previous;
        if (options_.audit) {
            if (const auto& cur = archive_.slot(niche)) previous = cur->fitness;
        }
        const double fitness = rec.fitness;
        if (archive_.try_insert(niche, std::move(rec)) && options_.audit)
            result_.audit.push_back({archive_.eval_count(), niche, previous, fitness});
        if (archive_.eval_count() % cfg_.snapshot_every == 0) record_snapshot();
    }

    void record_snapshot() {
        result_.snapshots.push_back(take_snapshot(archive_));
        if (options_.on_snapshot) options_.on_snapshot(result_.snapshots.back());
    }

    const QdConfig& cfg_;
    const Evaluator& eval_;
    Archive& archive_;
    Rng& rng_;
    const RunOptions& options_;
    QdResult& result_;
};

}  // namespace

QdResult run_qd(const QdConfig& cfg, const Estimates& est, const AssetUniverse* universe,
                const Portfolio& w0, CvtPartition partition, Rng& rng, const RunOptions& options) {
    cfg.validate();
    if (w0.size() != est.size()) throw DataError("qd-run: reference portfolio dimension mismatch");
    BehaviorMap behavior = make_behavior(cfg, est, universe);

    QdResult result;
    result.archive = Archive(std::move(partition));
    const Evaluator eval(est, std::move(behavior), result.archive.partition(), w0, cfg.c, cfg.fitness);
    result.w0 = w0;
    result.rr0 = eval.reference_point();

    Runner runner(cfg, eval, result.archive, rng, options, result);
    runner.initialize();
    if (cfg.batch > 0)
        runner.evolve_batched();
    else
        runner.evolve_sequential();
    runner.finish();
    return result;
}

QdResult run_qd(const QdConfig& cfg, const Estimates& est, const AssetUniverse* universe,
                const Portfolio& w0, const RunOptions& options) {
    cfg.validate();
    const BehaviorMap behavior = make_behavior(cfg, est, universe);
    Rng rng(cfg.seed);
    CvtPartition partition = build_cvt(behavior, cfg.niches, cfg.n_cvt, rng, cfg.seed, cfg.cvt_sampler);
    return run_qd(cfg, est, universe, w0, std::move(partition), rng, options);
}

}  // namespace qdport
