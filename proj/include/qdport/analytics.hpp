#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qdport/core.hpp"
#include "qdport/estimation.hpp"
#include "qdport/optimizer.hpp"
#include "qdport/qd.hpp"

namespace qdport {

/// Near-optimal niches over all niches.
double modified_coverage(const Archive& archive);

struct QdScores {
    double qd_score1 = 0.0;
    double qd_score_mod = 0.0;
};

/// Min-max normalized fitness sums; the normalization spans the whole archive.
/// If every fitness is equal each term counts as 1. Throws on an empty archive.
QdScores qd_scores(const Archive& archive);

struct ProfilePoint {
    double threshold = 0.0;
    std::size_t count = 0;
    double proportion = 0.0;
};

struct ArchiveProfiles {
    std::vector<ProfilePoint> ap1;  // non-near-optimal elites
    std::vector<ProfilePoint> ap2;  // near-optimal elites
};

/// Share of each subset with fitness >= threshold. Thresholds must ascend.
ArchiveProfiles archive_profiles(const Archive& archive, std::span<const double> ap1_thresholds,
                                 std::span<const double> ap2_thresholds);
ArchiveProfiles archive_profiles(const Archive& archive, std::span<const double> thresholds);
/// `points` evenly spaced thresholds over each subset's own fitness range.
ArchiveProfiles archive_profiles(const Archive& archive, std::size_t points = 100);

std::vector<double> linspace(double lo, double hi, std::size_t n);

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Counter-clockwise hull vertices without collinear points (monotone chain).
std::vector<Point2> convex_hull(std::vector<Point2> points);
/// Hull area; 0 for fewer than 3 points or collinear input.
double hull_area_2d(std::span<const Point2> points);

/// Area of the hull of 3-asset weight vectors inside the plane Σw = 1.
double weight_hull_area_3assets(std::span<const Portfolio> portfolios);
/// Same hull measured in the (w1, w2) coordinate plane: the in-plane area / √3.
double weight_hull_area_projected(std::span<const Portfolio> portfolios);

/// Hull area of the (σ, μ) points of the records, recomputed under `est`.
double rr_hull_area(std::span<const EliteRecord> records, const Estimates& est);

struct SharpeStats {
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
    std::size_t count = 0;
};

SharpeStats sharpe_stats(std::span<const EliteRecord> records, const Estimates& est, double rf);

std::vector<EliteRecord> near_optimal_records(const Archive& archive);

struct MetricsReport {
    std::size_t niches = 0;
    std::size_t occupied = 0;
    std::size_t near_optimal = 0;
    double coverage_mod = 0.0;
    double qd_score1 = 0.0;
    double qd_score_mod = 0.0;
    ArchiveProfiles profiles;
    double sharpe_mean = 0.0;
    double sharpe_std = 0.0;
    std::optional<double> hull_area_weights;
    std::optional<double> hull_area_weights_projected;
    std::optional<double> hull_area_rr;
};

MetricsReport compute_metrics(const Archive& archive, const Estimates& est, double rf,
                              std::size_t profile_points = 100);

struct SweepResult {
    std::vector<Eigen::Index> windows;
    std::vector<double> cs;
    MatrixXd coverage;  // windows × cs
};

/// Re-estimates on trailing windows, re-resolves the reference, and re-flags
/// every archived elite for each c. The archive is not modified.
SweepResult robustness_sweep(const Archive& archive, const ReturnsWindow& data,
                             std::span<const Eigen::Index> windows, std::span<const double> cs,
                             const EstimatorSettings& estimator, const ReferenceRule& reference,
                             const std::vector<double>& market_caps = {});

}  // namespace qdport
