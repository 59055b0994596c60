#pragma once

#include <cstdint>

#include "qdport/core.hpp"
#include "qdport/estimation.hpp"

namespace qdport {

/// Daily return model: r = alpha + beta·market + sector factor + noise.
struct SynthParams {
    std::size_t assets = 105;
    std::size_t sectors = 11;
    std::size_t days = 924;
    std::uint64_t seed = 1;
    double market_drift = 0.0005;  // per day
    double market_vol = 0.011;
    double sector_vol = 0.007;
    double idio_vol = 0.013;
    double alpha_vol = 0.0002;     // cross-sectional spread of per-asset drift
    double beta_lo = 0.6;
    double beta_hi = 1.4;
    double log_cap_mean = 23.7;    // ≈ 2e10
    double log_cap_sd = 1.2;
    std::string start_date = "2020-01-02";
};

struct SyntheticMarket {
    ReturnsWindow window;
    AssetUniverse universe;
    VectorXd market;  // the market factor itself
};

/// Deterministic per seed. Asset i belongs to sector i mod sectors.
SyntheticMarket generate_synthetic_universe(const SynthParams& params);

/// Weekday dates starting at `start` (ISO), `count` of them.
std::vector<std::string> business_days(const std::string& start, std::size_t count);

}  // namespace qdport
