#pragma once

#include <span>

#include "qdport/qd.hpp"

namespace qdport {

struct Selection {
    Portfolio w;
    std::size_t niche = 0;
    bool direct_hit = false;
};

/// Investor-side pick from an archive: the preferred descriptor's own niche
/// if it holds a near-optimal elite, else the near-optimal niche whose
/// centroid is closest to that niche's centroid (lowest index on ties).
/// Throws DataError if no niche holds a near-optimal elite.
Selection select_portfolio(const Archive& archive, std::span<const double> preferred_bd);

}  // namespace qdport
