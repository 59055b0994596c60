#include "qdport/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "qdport/behavior.hpp"

namespace qdport {

std::vector<std::string> business_days(const std::string& start, std::size_t count) {
    using namespace std::chrono;
    int y = 0;
    unsigned m = 0, d = 0;
    if (std::sscanf(start.c_str(), "%d-%u-%u", &y, &m, &d) != 3) throw DataError("bad ISO date " + start);
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) throw DataError("bad ISO date " + start);
    sys_days day_ = ymd;
    std::vector<std::string> out;
    out.reserve(count);
    char buf[16];
    while (out.size() < count) {
        const weekday wd{day_};
        if (wd != Saturday && wd != Sunday) {
            const year_month_day cur{day_};
            std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(cur.year()),
                          static_cast<unsigned>(cur.month()), static_cast<unsigned>(cur.day()));
            out.emplace_back(buf);
        }
        day_ += days{1};
    }
    return out;
}

SyntheticMarket generate_synthetic_universe(const SynthParams& p) {
    if (p.sectors < 1 || p.assets < p.sectors || p.assets < 2)
        throw DataError("synth: need assets >= sectors >= 1 and assets >= 2");
    if (p.days < 2) throw DataError("synth: need at least 2 days");
    Rng rng(p.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> beta_dist(p.beta_lo, p.beta_hi);

    const auto n = static_cast<Eigen::Index>(p.assets);
    const auto t = static_cast<Eigen::Index>(p.days);
    const auto l = static_cast<Eigen::Index>(p.sectors);

    SyntheticMarket out;
    AssetUniverse& u = out.universe;
    u.sectors = static_cast<int>(p.sectors);
    VectorXd beta(n), alpha(n);
    char name[16];
    for (Eigen::Index i = 0; i < n; ++i) {
        std::snprintf(name, sizeof name, "A%03d", static_cast<int>(i));
        u.names.emplace_back(name);
        u.sector_of.push_back(static_cast<int>(i % l));
        beta(i) = beta_dist(rng);
        alpha(i) = p.alpha_vol * z(rng);
        u.market_cap.push_back(std::exp(p.log_cap_mean + p.log_cap_sd * z(rng)));
    }

    out.market.resize(t);
    MatrixXd& r = out.window.returns;
    r.resize(t, n);
    VectorXd sector(l);
    for (Eigen::Index d = 0; d < t; ++d) {
        const double m = p.market_drift + p.market_vol * z(rng);
        out.market(d) = m;
        for (Eigen::Index s = 0; s < l; ++s) sector(s) = p.sector_vol * z(rng);
        for (Eigen::Index i = 0; i < n; ++i)
            r(d, i) = alpha(i) + beta(i) * m + sector(i % l) + p.idio_vol * z(rng);
    }
    out.window.names = u.names;
    out.window.dates = business_days(p.start_date, p.days);
    return out;
}

}  // namespace qdport
