#include "qdport/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace qdport::io {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ss(line);
    while (std::getline(ss, cur, sep)) out.push_back(trim(cur));
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || s.empty())
        throw DataError(where + ": cannot parse number '" + s + "'");
    return v;
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    const int m = std::stoi(s.substr(5, 2));
    const int d = std::stoi(s.substr(8, 2));
    return m >= 1 && m <= 12 && d >= 1 && d <= 31;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split(line));
    }
    return rows;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<double> to_vec(const json& j, const char* what) {
    if (!j.is_array()) throw DataError(std::string(what) + ": expected an array");
    return j.get<std::vector<double>>();
}

}  // namespace

ReturnsWindow read_returns_csv(const fs::path& path) {
    const auto rows = read_rows(path);
    const std::string where = path.string();
    if (rows.size() < 3) throw DataError(where + ": need a header and at least two rows");
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "date")
        throw DataError(where + ": header must be date,<asset1>,...,<assetN>");
    ReturnsWindow win;
    win.names.assign(header.begin() + 1, header.end());
    const auto n = static_cast<Eigen::Index>(win.names.size());
    win.returns.resize(static_cast<Eigen::Index>(rows.size() - 1), n);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (static_cast<Eigen::Index>(row.size()) != n + 1)
            throw DataError(where + ": row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                            " fields, expected " + std::to_string(n + 1));
        if (!is_iso_date(row[0])) throw DataError(where + ": bad ISO date '" + row[0] + "'");
        win.dates.push_back(row[0]);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (row[i + 1].empty()) throw DataError(where + ": missing value on " + row[0]);
            win.returns(static_cast<Eigen::Index>(r - 1), i) = to_double(row[i + 1], where);
        }
    }
    win.validate();
    return win;
}

void write_returns_csv(const fs::path& path, const ReturnsWindow& win) {
    auto out = open_out(path);
    out << "date";
    for (const auto& n : win.names) out << ',' << n;
    out << '\n';
    for (Eigen::Index t = 0; t < win.days(); ++t) {
        out << win.dates.at(static_cast<std::size_t>(t));
        for (Eigen::Index i = 0; i < win.assets(); ++i) out << ',' << num(win.returns(t, i));
        out << '\n';
    }
}

AssetUniverse read_universe_csv(const fs::path& path) {
    const auto rows = read_rows(path);
    const std::string where = path.string();
    if (rows.size() < 3) throw DataError(where + ": need a header and at least two assets");
    if (rows[0].size() != 3 || rows[0][0] != "asset" || rows[0][1] != "sector" || rows[0][2] != "market_cap")
        throw DataError(where + ": header must be asset,sector,market_cap");
    std::vector<std::string> labels;
    AssetUniverse u;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) throw DataError(where + ": row " + std::to_string(r + 1) + " malformed");
        u.names.push_back(rows[r][0]);
        labels.push_back(rows[r][1]);
        u.market_cap.push_back(to_double(rows[r][2], where));
    }
    const bool numeric = std::all_of(labels.begin(), labels.end(), [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    });
    if (numeric) {
        int top = 0;
        for (const auto& s : labels) {
            u.sector_of.push_back(std::stoi(s));
            top = std::max(top, u.sector_of.back());
        }
        u.sectors = top + 1;
    } else {
        const std::set<std::string> distinct(labels.begin(), labels.end());
        const std::vector<std::string> order(distinct.begin(), distinct.end());
        for (const auto& s : labels)
            u.sector_of.push_back(static_cast<int>(std::lower_bound(order.begin(), order.end(), s) - order.begin()));
        u.sectors = static_cast<int>(order.size());
    }
    u.validate();
    return u;
}

void write_universe_csv(const fs::path& path, const AssetUniverse& u) {
    auto out = open_out(path);
    out << "asset,sector,market_cap\n";
    for (std::size_t i = 0; i < u.size(); ++i)
        out << u.names[i] << ',' << u.sector_of[i] << ',' << num(u.market_cap[i]) << '\n';
}

VectorXd read_market_csv(const fs::path& path) {
    const auto rows = read_rows(path);
    const std::string where = path.string();
    if (rows.size() < 3 || rows[0].size() != 2) throw DataError(where + ": expected date,market columns");
    VectorXd m(static_cast<Eigen::Index>(rows.size() - 1));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) throw DataError(where + ": row " + std::to_string(r + 1) + " malformed");
        m(static_cast<Eigen::Index>(r - 1)) = to_double(rows[r][1], where);
    }
    return m;
}

void write_market_csv(const fs::path& path, const std::vector<std::string>& dates, const VectorXd& m) {
    auto out = open_out(path);
    out << "date,market\n";
    for (Eigen::Index t = 0; t < m.size(); ++t) out << dates.at(static_cast<std::size_t>(t)) << ',' << num(m(t)) << '\n';
}

AssetUniverse align_universe(const AssetUniverse& u, const std::vector<std::string>& names) {
    AssetUniverse out;
    out.sectors = u.sectors;
    for (const auto& name : names) {
        const auto it = std::find(u.names.begin(), u.names.end(), name);
        if (it == u.names.end()) throw DataError("universe metadata has no row for asset " + name);
        const auto i = static_cast<std::size_t>(it - u.names.begin());
        out.names.push_back(name);
        out.sector_of.push_back(u.sector_of[i]);
        out.market_cap.push_back(u.market_cap[i]);
    }
    out.validate();
    return out;
}

json to_json(const Estimates& est) {
    json sigma = json::array();
    for (Eigen::Index i = 0; i < est.sigma.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(est.sigma.cols()));
        for (Eigen::Index j = 0; j < est.sigma.cols(); ++j) row[static_cast<std::size_t>(j)] = est.sigma(i, j);
        sigma.push_back(row);
    }
    return {{"names", est.names},
            {"mu", std::vector<double>(est.mu.data(), est.mu.data() + est.mu.size())},
            {"sigma", sigma}};
}

Estimates estimates_from_json(const json& j) {
    Estimates est;
    try {
        est.names = j.value("names", std::vector<std::string>{});
        const auto mu = to_vec(j.at("mu"), "estimates.mu");
        const auto n = static_cast<Eigen::Index>(mu.size());
        est.mu = Eigen::Map<const VectorXd>(mu.data(), n);
        const auto& rows = j.at("sigma");
        if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
            throw DataError("estimates.sigma: expected " + std::to_string(n) + " rows");
        est.sigma.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto row = to_vec(rows[static_cast<std::size_t>(i)], "estimates.sigma");
            if (static_cast<Eigen::Index>(row.size()) != n) throw DataError("estimates.sigma: ragged row");
            for (Eigen::Index k = 0; k < n; ++k) est.sigma(i, k) = row[static_cast<std::size_t>(k)];
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("estimates JSON: ") + e.what());
    }
    est.validate();
    return est;
}

void save_estimates(const fs::path& path, const Estimates& est) { write_text(path, to_json(est).dump(2) + "\n"); }

Estimates load_estimates(const fs::path& path) {
    try {
        return estimates_from_json(json::parse(read_text(path)));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

json to_json(const CvtPartition& p) {
    json centroids = json::array();
    for (std::size_t i = 0; i < p.niches(); ++i) {
        const auto c = p.centroid(i);
        centroids.push_back(std::vector<double>(c.begin(), c.end()));
    }
    return {{"behavior", std::string(to_string(p.kind()))},
            {"seed", p.seed()},
            {"M", p.niches()},
            {"d", p.dim()},
            {"centroids", centroids}};
}

CvtPartition partition_from_json(const json& j) {
    try {
        const auto m = j.at("M").get<std::size_t>();
        const auto d = j.at("d").get<std::size_t>();
        const auto& rows = j.at("centroids");
        if (rows.size() != m) throw DataError("partition: centroid count does not match M");
        std::vector<double> flat;
        flat.reserve(m * d);
        for (const auto& r : rows) {
            const auto v = to_vec(r, "partition.centroids");
            if (v.size() != d) throw DataError("partition: centroid dimension does not match d");
            flat.insert(flat.end(), v.begin(), v.end());
        }
        return CvtPartition(std::move(flat), d, parse_behavior(j.at("behavior").get<std::string>()),
                            j.at("seed").get<std::uint64_t>());
    } catch (const json::exception& e) {
        throw DataError(std::string("partition JSON: ") + e.what());
    }
}

void save_partition(const fs::path& path, const CvtPartition& p) { write_text(path, to_json(p).dump() + "\n"); }

CvtPartition load_partition(const fs::path& path) {
    try {
        return partition_from_json(json::parse(read_text(path)));
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

json to_json(const QdConfig& cfg) {
    return {{"M", cfg.niches},
            {"n_max", cfg.n_max},
            {"n_cvt", cfg.n_cvt},
            {"p_init", cfg.p_init},
            {"m", cfg.mutation},
            {"c", cfg.c},
            {"fitness", std::string(to_string(cfg.fitness))},
            {"behavior", std::string(to_string(cfg.behavior))},
            {"seed", cfg.seed},
            {"rf", cfg.rf},
            {"batch", cfg.batch},
            {"threads", cfg.threads},
            {"snapshot_every", cfg.snapshot_every},
            {"cvt_sampler", std::string(to_string(cfg.cvt_sampler))}};
}

QdConfig config_from_json(const json& j) {
    QdConfig cfg;
    try {
        cfg.niches = j.at("M").get<std::size_t>();
        cfg.n_max = j.at("n_max").get<std::size_t>();
        cfg.n_cvt = j.at("n_cvt").get<std::size_t>();
        cfg.p_init = j.at("p_init").get<double>();
        cfg.mutation = j.at("m").get<double>();
        cfg.c = j.at("c").get<double>();
        cfg.fitness = parse_fitness(j.at("fitness").get<std::string>());
        cfg.behavior = parse_behavior(j.at("behavior").get<std::string>());
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.rf = j.at("rf").get<double>();
        cfg.batch = j.value("batch", std::size_t{0});
        cfg.threads = j.value("threads", 1u);
        cfg.snapshot_every = j.value("snapshot_every", std::size_t{10'000});
        cfg.cvt_sampler = parse_sampler(j.value("cvt_sampler", std::string("dirichlet")));
    } catch (const json::exception& e) {
        throw DataError(std::string("config JSON: ") + e.what());
    }
    return cfg;
}

json to_json(const ReferenceRule& r) {
    switch (r.kind) {
        case ReferenceRule::Kind::weights:
            return {{"kind", "weights"}, {"weights", r.weights.vec()}};
        case ReferenceRule::Kind::gamma:
            return {{"kind", "gamma"}, {"gamma", r.gamma}};
        case ReferenceRule::Kind::max_sharpe:
            return {{"kind", "max_sharpe"}, {"rf", r.rf}};
    }
    return {};
}

ReferenceRule reference_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "weights") return ReferenceRule::fixed(Portfolio(j.at("weights").get<std::vector<double>>()));
    if (kind == "gamma") return ReferenceRule::risk_aversion(j.at("gamma").get<double>());
    if (kind == "max_sharpe") return ReferenceRule::tangency(j.at("rf").get<double>());
    throw DataError("unknown reference kind '" + kind + "'");
}

void save_archive(const fs::path& path, const ArchiveFile& file) {
    auto out = open_out(path);
    const Archive& a = file.archive;
    json header = {{"type", "header"},
                   {"config", to_json(file.config)},
                   {"reference", to_json(file.reference)},
                   {"w0", file.w0.vec()},
                   {"mu0", file.rr0.mu},
                   {"sigma0", file.rr0.sigma},
                   {"eval_count", a.eval_count()},
                   {"estimates_checksum", file.estimates_checksum},
                   {"universe_checksum", file.universe_checksum},
                   {"partition", to_json(a.partition())}};
    out << header.dump() << '\n';
    for (std::size_t n = 0; n < a.niches(); ++n) {
        const auto& rec = a.slot(n);
        if (!rec) continue;
        const auto c = a.partition().centroid(n);
        json line = {{"niche", n},
                     {"centroid", std::vector<double>(c.begin(), c.end())},
                     {"weights", rec->w.vec()},
                     {"bd", rec->bd.values},
                     {"fitness", rec->fitness},
                     {"mu", rec->rr.mu},
                     {"sigma", rec->rr.sigma},
                     {"near_optimal", rec->near_optimal}};
        out << line.dump() << '\n';
    }
}

ArchiveFile load_archive(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty archive file");
    ArchiveFile file;
    try {
        const json header = json::parse(line);
        if (header.value("type", "") != "header") throw DataError(path.string() + ": missing header line");
        file.config = config_from_json(header.at("config"));
        file.reference = reference_from_json(header.at("reference"));
        file.w0 = Portfolio(header.at("w0").get<std::vector<double>>());
        file.rr0 = {header.at("mu0").get<double>(), header.at("sigma0").get<double>()};
        file.estimates_checksum = header.value("estimates_checksum", "");
        file.universe_checksum = header.value("universe_checksum", "");
        file.archive = Archive(partition_from_json(header.at("partition")));
        file.archive.set_eval_count(header.at("eval_count").get<std::size_t>());
        std::size_t lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (trim(line).empty()) continue;
            const json j = json::parse(line);
            EliteRecord rec;
            rec.w = Portfolio(j.at("weights").get<std::vector<double>>());
            rec.bd.values = j.at("bd").get<std::vector<double>>();
            rec.fitness = j.at("fitness").get<double>();
            rec.rr = {j.at("mu").get<double>(), j.at("sigma").get<double>()};
            rec.near_optimal = j.at("near_optimal").get<bool>();
            const auto niche = j.at("niche").get<std::size_t>();
            if (niche >= file.archive.niches())
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": niche out of range");
            if (file.archive.slot(niche))
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": duplicate niche");
            file.archive.try_insert(niche, std::move(rec));
        }
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return file;
}

json to_json(const MetricsReport& m) {
    auto curve = [](const std::vector<ProfilePoint>& pts) {
        json a = json::array();
        for (const auto& p : pts) a.push_back({{"threshold", p.threshold}, {"count", p.count}, {"proportion", p.proportion}});
        return a;
    };
    json j = {{"niches", m.niches},
              {"occupied", m.occupied},
              {"near_optimal", m.near_optimal},
              {"coverage_mod", m.coverage_mod},
              {"qd_score1", m.qd_score1},
              {"qd_score_mod", m.qd_score_mod},
              {"sharpe_mean", m.sharpe_mean},
              {"sharpe_std", m.sharpe_std},
              {"ap1", curve(m.profiles.ap1)},
              {"ap2", curve(m.profiles.ap2)}};
    j["hull_area_weights"] = m.hull_area_weights ? json(*m.hull_area_weights) : json(nullptr);
    j["hull_area_weights_projected"] =
        m.hull_area_weights_projected ? json(*m.hull_area_weights_projected) : json(nullptr);
    j["hull_area_rr"] = m.hull_area_rr ? json(*m.hull_area_rr) : json(nullptr);
    j["hull_area_rr_x1e3"] = m.hull_area_rr ? json(*m.hull_area_rr * 1e3) : json(nullptr);
    return j;
}

void write_metrics_csv(const fs::path& path, const MetricsReport& m) {
    auto out = open_out(path);
    out << "metric,param,value\n";
    out << "niches,," << m.niches << '\n';
    out << "occupied,," << m.occupied << '\n';
    out << "near_optimal,," << m.near_optimal << '\n';
    out << "coverage_mod,," << num(m.coverage_mod) << '\n';
    out << "qd_score1,," << num(m.qd_score1) << '\n';
    out << "qd_score_mod,," << num(m.qd_score_mod) << '\n';
    out << "sharpe_mean,," << num(m.sharpe_mean) << '\n';
    out << "sharpe_std,," << num(m.sharpe_std) << '\n';
    if (m.hull_area_weights) out << "hull_area_weights,," << num(*m.hull_area_weights) << '\n';
    if (m.hull_area_weights_projected)
        out << "hull_area_weights_projected,," << num(*m.hull_area_weights_projected) << '\n';
    if (m.hull_area_rr) out << "hull_area_rr_x1e3,," << num(*m.hull_area_rr * 1e3) << '\n';
    for (const auto& p : m.profiles.ap1) {
        out << "ap1," << num(p.threshold) << ',' << num(p.proportion) << '\n';
        out << "ap1_count," << num(p.threshold) << ',' << p.count << '\n';
    }
    for (const auto& p : m.profiles.ap2) {
        out << "ap2," << num(p.threshold) << ',' << num(p.proportion) << '\n';
        out << "ap2_count," << num(p.threshold) << ',' << p.count << '\n';
    }
}

void write_sweep_csv(const fs::path& path, const SweepResult& s) {
    auto out = open_out(path);
    out << "T";
    for (double c : s.cs) out << ",c=" << num(c);
    out << '\n';
    for (std::size_t t = 0; t < s.windows.size(); ++t) {
        out << s.windows[t];
        for (std::size_t c = 0; c < s.cs.size(); ++c)
            out << ',' << num(s.coverage(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)));
        out << '\n';
    }
}

void write_frontier_csv(const fs::path& path, const std::vector<FrontierPoint>& pts) {
    auto out = open_out(path);
    out << "gamma,sigma,mu";
    const std::size_t n = pts.empty() ? 0 : pts.front().w.size();
    for (std::size_t i = 0; i < n; ++i) out << ",w" << (i + 1);
    out << '\n';
    for (const auto& p : pts) {
        out << num(p.gamma) << ',' << num(p.rr.sigma) << ',' << num(p.rr.mu);
        for (double w : p.w.weights()) out << ',' << num(w);
        out << '\n';
    }
}

void write_snapshots_csv(const fs::path& path, const std::vector<Snapshot>& snaps) {
    auto out = open_out(path);
    out << "evals,occupied,coverage,qd_score1,qd_score_mod\n";
    for (const auto& s : snaps)
        out << s.evals << ',' << s.occupied << ',' << num(s.coverage) << ',' << num(s.qd_score1) << ','
            << num(s.qd_score_mod) << '\n';
}

std::vector<Snapshot> read_snapshots_csv(const fs::path& path) {
    const auto rows = read_rows(path);
    const std::string where = path.string();
    if (rows.empty() || rows[0].size() != 5 || rows[0][0] != "evals")
        throw DataError(where + ": not a snapshot file");
    std::vector<Snapshot> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 5) throw DataError(where + ": malformed row " + std::to_string(r + 1));
        Snapshot s;
        s.evals = static_cast<std::size_t>(to_double(rows[r][0], where));
        s.occupied = static_cast<std::size_t>(to_double(rows[r][1], where));
        s.coverage = to_double(rows[r][2], where);
        s.qd_score1 = to_double(rows[r][3], where);
        s.qd_score_mod = to_double(rows[r][4], where);
        out.push_back(s);
    }
    return out;
}

std::string checksum(const Estimates& est) { return hex(fnv1a(to_json(est).dump())); }

std::string checksum(const AssetUniverse& u) {
    json j = {{"names", u.names}, {"sector_of", u.sector_of}, {"market_cap", u.market_cap}, {"sectors", u.sectors}};
    return hex(fnv1a(j.dump()));
}

std::string file_checksum(const fs::path& path) { return hex(fnv1a(read_text(path))); }

std::map<std::string, std::string> read_key_values(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty() || t.front() == '[') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> apply_config(QdConfig& cfg, const std::map<std::string, std::string>& kv) {
    std::map<std::string, std::string> rest;
    auto as_size = [](const std::string& k, const std::string& v) {
        const double d = to_double(v, k);
        if (d < 0 || d != std::floor(d)) throw DataError("config: " + k + " must be a non-negative integer");
        return static_cast<std::size_t>(d);
    };
    for (const auto& [k, v] : kv) {
        if (k == "M") cfg.niches = as_size(k, v);
        else if (k == "n_max") cfg.n_max = as_size(k, v);
        else if (k == "n_cvt") cfg.n_cvt = as_size(k, v);
        else if (k == "p_init") cfg.p_init = to_double(v, k);
        else if (k == "m") cfg.mutation = to_double(v, k);
        else if (k == "c") cfg.c = to_double(v, k);
        else if (k == "fitness") cfg.fitness = parse_fitness(v);
        else if (k == "behavior") cfg.behavior = parse_behavior(v);
        else if (k == "seed") cfg.seed = as_size(k, v);
        else if (k == "rf") cfg.rf = to_double(v, k);
        else if (k == "batch") cfg.batch = as_size(k, v);
        else if (k == "threads") cfg.threads = static_cast<unsigned>(as_size(k, v));
        else if (k == "snapshot_every") cfg.snapshot_every = as_size(k, v);
        else if (k == "cvt_sampler") cfg.cvt_sampler = parse_sampler(v);
        else rest[k] = v;
    }
    return rest;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    for (const auto& part : split(csv)) out.push_back(to_double(part, "list"));
    return out;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
}

}  // namespace qdport::io
