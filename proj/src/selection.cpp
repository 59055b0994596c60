#include "qdport/selection.hpp"

#include <limits>

namespace qdport {

Selection select_portfolio(const Archive& archive, std::span<const double> preferred_bd) {
    const CvtPartition& part = archive.partition();
    const std::size_t home = part.niche_index(preferred_bd);
    if (const auto& rec = archive.slot(home); rec && rec->near_optimal) return {rec->w, home, true};

    const auto target = part.centroid(home);
    std::size_t best = archive.niches();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < archive.niches(); ++n) {
        const auto& rec = archive.slot(n);
        if (!rec || !rec->near_optimal) continue;
        const auto c = part.centroid(n);
        double d2 = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) d2 += (c[k] - target[k]) * (c[k] - target[k]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = n;
        }
    }
    if (best == archive.niches()) {
        throw DataError(
            "select: the archive holds no near-optimal portfolio; loosen c or extend the evaluation budget");
    }
    return {archive.slot(best)->w, best, false};
}

}  // namespace qdport
