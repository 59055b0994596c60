#pragma once

#include <vector>

#include "qdport/qd.hpp"

namespace fixture {

// Archive over fixed 2-D centroids with hand-placed records.
struct Entry {
    std::size_t niche;
    double fitness;
    bool near_optimal;
};

inline qdport::Archive archive(const std::vector<double>& centroids, const std::vector<Entry>& entries) {
    qdport::Archive a(qdport::CvtPartition(centroids, 2, qdport::BehaviorKind::b1, 0));
    for (const Entry& e : entries) {
        qdport::EliteRecord r;
        const auto c = a.partition().centroid(e.niche);
        r.bd.values.assign(c.begin(), c.end());
        r.w = qdport::Portfolio::unit(2, e.niche % 2);
        r.fitness = e.fitness;
        r.near_optimal = e.near_optimal;
        a.try_insert(e.niche, r);
    }
    return a;
}

}  // namespace fixture
