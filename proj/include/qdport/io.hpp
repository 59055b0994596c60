#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdport/analytics.hpp"
#include "qdport/core.hpp"
#include "qdport/estimation.hpp"
#include "qdport/optimizer.hpp"
#include "qdport/qd.hpp"

namespace qdport::io {

using nlohmann::json;
namespace fs = std::filesystem;

// CSV -------------------------------------------------------------------

/// `date,<asset1>,...,<assetN>` with ISO dates and decimal simple returns.
ReturnsWindow read_returns_csv(const fs::path& path);
void write_returns_csv(const fs::path& path, const ReturnsWindow& win);

/// `asset,sector,market_cap`. Integer sector labels are used as indices;
/// any other labels are numbered in sorted order.
AssetUniverse read_universe_csv(const fs::path& path);
void write_universe_csv(const fs::path& path, const AssetUniverse& u);

/// `date,market` series.
VectorXd read_market_csv(const fs::path& path);
void write_market_csv(const fs::path& path, const std::vector<std::string>& dates, const VectorXd& m);

/// Reorders universe rows to follow `names`; throws if any is missing.
AssetUniverse align_universe(const AssetUniverse& u, const std::vector<std::string>& names);

// JSON ------------------------------------------------------------------

json to_json(const Estimates& est);
Estimates estimates_from_json(const json& j);
void save_estimates(const fs::path& path, const Estimates& est);
Estimates load_estimates(const fs::path& path);

json to_json(const CvtPartition& p);
CvtPartition partition_from_json(const json& j);
void save_partition(const fs::path& path, const CvtPartition& p);
CvtPartition load_partition(const fs::path& path);

json to_json(const QdConfig& cfg);
QdConfig config_from_json(const json& j);

json to_json(const ReferenceRule& r);
ReferenceRule reference_from_json(const json& j);

/// Archive JSONL: one header line, then one record per occupied niche in niche order.
struct ArchiveFile {
    Archive archive;
    QdConfig config;
    ReferenceRule reference;
    Portfolio w0;
    RiskReturnPoint rr0;
    std::string estimates_checksum;
    std::string universe_checksum;
};

void save_archive(const fs::path& path, const ArchiveFile& file);
ArchiveFile load_archive(const fs::path& path);

json to_json(const MetricsReport& m);
/// Tidy `metric,param,value` rows.
void write_metrics_csv(const fs::path& path, const MetricsReport& m);

void write_sweep_csv(const fs::path& path, const SweepResult& s);
/// `gamma,sigma,mu,w1..wN`.
void write_frontier_csv(const fs::path& path, const std::vector<FrontierPoint>& pts);
void write_snapshots_csv(const fs::path& path, const std::vector<Snapshot>& s);
std::vector<Snapshot> read_snapshots_csv(const fs::path& path);

// Checksums ---------------------------------------------------------------

/// FNV-1a over the canonical JSON text, as 16 hex digits.
std::string checksum(const Estimates& est);
std::string checksum(const AssetUniverse& u);
std::string file_checksum(const fs::path& path);

// Config ----------------------------------------------------------------

/// Flat `key = value` lines; `#` starts a comment; surrounding quotes stripped.
std::map<std::string, std::string> read_key_values(const fs::path& path);
/// Applies known QdConfig keys (M, n_max, n_cvt, p_init, m, c, fitness,
/// behavior, seed, rf, batch, threads, snapshot_every). Returns unused keys.
std::map<std::string, std::string> apply_config(QdConfig& cfg, const std::map<std::string, std::string>& kv);

std::vector<double> parse_doubles(const std::string& csv);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace qdport::io
