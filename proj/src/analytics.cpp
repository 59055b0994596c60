#include "qdport/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qdport {

double modified_coverage(const Archive& archive) {
    if (archive.niches() == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t n : archive.filled()) hits += archive.slot(n)->near_optimal ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(archive.niches());
}

QdScores qd_scores(const Archive& archive) {
    if (archive.occupied() == 0) throw DataError("qd_scores: archive is empty");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t n : archive.filled()) {
        lo = std::min(lo, archive.slot(n)->fitness);
        hi = std::max(hi, archive.slot(n)->fitness);
    }
    const double span = hi - lo;
    QdScores out;
    for (std::size_t n : archive.filled()) {
        const auto& rec = *archive.slot(n);
        const double term = span > 0.0 ? (rec.fitness - lo) / span : 1.0;
        out.qd_score1 += term;
        if (rec.near_optimal) out.qd_score_mod += term;
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (n > 0) v.back() = hi;
    return v;
}

namespace {

std::vector<ProfilePoint> profile(const std::vector<double>& fitness, std::span<const double> thresholds) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end()))
        throw DataError("archive_profiles: thresholds must be ascending");
    const double denom = static_cast<double>(std::max<std::size_t>(1, fitness.size()));
    std::vector<ProfilePoint> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        const auto count = static_cast<std::size_t>(
            std::count_if(fitness.begin(), fitness.end(), [t](double f) { return f >= t; }));
        out.push_back({t, count, static_cast<double>(count) / denom});
    }
    return out;
}

void split_fitness(const Archive& archive, std::vector<double>& other, std::vector<double>& near) {
    for (std::size_t n : archive.filled()) {
        const auto& rec = *archive.slot(n);
        (rec.near_optimal ? near : other).push_back(rec.fitness);
    }
}

std::vector<double> range_grid(const std::vector<double>& f, std::size_t points) {
    if (f.empty() || points == 0) return {};
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    return linspace(*lo, *hi, points);
}

}  // namespace

ArchiveProfiles archive_profiles(const Archive& archive, std::span<const double> ap1_thresholds,
                                 std::span<const double> ap2_thresholds) {
    std::vector<double> other, near;
    split_fitness(archive, other, near);
    return {profile(other, ap1_thresholds), profile(near, ap2_thresholds)};
}

ArchiveProfiles archive_profiles(const Archive& archive, std::span<const double> thresholds) {
    return archive_profiles(archive, thresholds, thresholds);
}

ArchiveProfiles archive_profiles(const Archive& archive, std::size_t points) {
    std::vector<double> other, near;
    split_fitness(archive, other, near);
    return {profile(other, range_grid(other, points)), profile(near, range_grid(near, points))};
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
    std::sort(pts.begin(), pts.end(),
              [](const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }),
              pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const Point2& o, const Point2& a, const Point2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Point2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double hull_area_2d(std::span<const Point2> points) {
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw DataError("hull_area_2d: non-finite point");
    }
    const std::vector<Point2> hull = convex_hull({points.begin(), points.end()});
    if (hull.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point2& a = hull[i];
        const Point2& b = hull[(i + 1) % hull.size()];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * std::abs(twice);
}

double weight_hull_area_3assets(std::span<const Portfolio> portfolios) {
    static const double kU1 = 1.0 / std::sqrt(2.0);
    static const double kU2 = 1.0 / std::sqrt(6.0);
    std::vector<Point2> pts;
    pts.reserve(portfolios.size());
    for (const auto& w : portfolios) {
        if (w.size() != 3) throw DataError("weight_hull_area_3assets: portfolios must have 3 assets");
        pts.push_back({(w[0] - w[1]) * kU1, (w[0] + w[1] - 2.0 * w[2]) * kU2});
    }
    return hull_area_2d(pts);
}

double weight_hull_area_projected(std::span<const Portfolio> portfolios) {
    return weight_hull_area_3assets(portfolios) / std::sqrt(3.0);
}

double rr_hull_area(std::span<const EliteRecord> records, const Estimates& est) {
    std::vector<Point2> pts;
    pts.reserve(records.size());
    for (const auto& r : records) {
        const RiskReturnPoint rr = risk_return(r.w, est);
        pts.push_back({rr.sigma, rr.mu});
    }
    return hull_area_2d(pts);
}

SharpeStats sharpe_stats(std::span<const EliteRecord> records, const Estimates& est, double rf) {
    if (records.empty()) throw DataError("sharpe_stats: no records");
    std::vector<double> s;
    s.reserve(records.size());
    for (const auto& r : records) s.push_back(sharpe(r.w, est, rf));
    SharpeStats out;
    out.count = s.size();
    for (double x : s) out.mean += x;
    out.mean /= static_cast<double>(s.size());
    double var = 0.0;
    for (double x : s) var += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(var / static_cast<double>(s.size()));
    return out;
}

std::vector<EliteRecord> near_optimal_records(const Archive& archive) {
    std::vector<EliteRecord> out;
    for (std::size_t n = 0; n < archive.niches(); ++n) {
        if (const auto& rec = archive.slot(n); rec && rec->near_optimal) out.push_back(*rec);
    }
    return out;
}

MetricsReport compute_metrics(const Archive& archive, const Estimates& est, double rf,
                              std::size_t profile_points) {
    MetricsReport m;
    m.niches = archive.niches();
    m.occupied = archive.occupied();
    m.coverage_mod = modified_coverage(archive);
    if (archive.occupied() > 0) {
        const QdScores q = qd_scores(archive);
        m.qd_score1 = q.qd_score1;
        m.qd_score_mod = q.qd_score_mod;
    }
    m.profiles = archive_profiles(archive, profile_points);
    const std::vector<EliteRecord> near = near_optimal_records(archive);
    m.near_optimal = near.size();
    if (!near.empty()) {
        const SharpeStats s = sharpe_stats(near, est, rf);
        m.sharpe_mean = s.mean;
        m.sharpe_std = s.std;
        m.hull_area_rr = rr_hull_area(near, est);
        if (est.size() == 3 && archive.partition().kind() == BehaviorKind::b1) {
            std::vector<Portfolio> ws;
            for (const auto& r : near) ws.push_back(r.w);
            m.hull_area_weights = weight_hull_area_3assets(ws);
            m.hull_area_weights_projected = *m.hull_area_weights / std::sqrt(3.0);
        }
    }
    return m;
}

SweepResult robustness_sweep(const Archive& archive, const ReturnsWindow& data,
                             std::span<const Eigen::Index> windows, std::span<const double> cs,
                             const EstimatorSettings& estimator, const ReferenceRule& reference,
                             const std::vector<double>& market_caps) {
    SweepResult out;
    out.windows.assign(windows.begin(), windows.end());
    out.cs.assign(cs.begin(), cs.end());
    out.coverage = MatrixXd::Zero(static_cast<Eigen::Index>(windows.size()),
                                  static_cast<Eigen::Index>(cs.size()));
    for (double c : cs) {
        if (!(c > 0.0 && c < 1.0)) throw DataError("robustness_sweep: c must be in (0, 1)");
    }
    const auto niches = static_cast<double>(std::max<std::size_t>(1, archive.niches()));
    for (std::size_t ti = 0; ti < windows.size(); ++ti) {
        const Eigen::Index t = windows[ti];
        if (t > data.days()) {
            throw DataError("robustness_sweep: window T=" + std::to_string(t) + " exceeds the " +
                            std::to_string(data.days()) + " days of history");
        }
        const Estimates est = estimate(data.trailing(t), estimator, market_caps);
        const Portfolio w0 = reference.resolve(est);
        const RiskReturnPoint rr0 = risk_return(w0, est);
        std::vector<RiskReturnPoint> points;
        points.reserve(archive.occupied());
        for (std::size_t n : archive.filled()) points.push_back(risk_return(archive.slot(n)->w, est));
        for (std::size_t ci = 0; ci < cs.size(); ++ci) {
            std::size_t hits = 0;
            for (const auto& rr : points) hits += in_region(rr, rr0, cs[ci]) ? 1 : 0;
            out.coverage(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(ci)) =
                static_cast<double>(hits) / niches;
        }
    }
    return out;
}

}  // namespace qdport
