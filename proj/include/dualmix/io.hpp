#pragma once

#include "dualmix/characterize.hpp"
#include "dualmix/forecast.hpp"
#include "dualmix/mixtures.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dualmix {

inline constexpr int kSchemaVersion = 1;

/// One line of the cascade JSONL format:
///   {"item_id": "...", "publisher_id": "...", "cascade_id": "...", "times": [0, ...]}
struct CascadeRecord {
  std::string item_id;
  std::string publisher_id;
  std::string cascade_id;
  Cascade cascade{{0.0}};
};

/// Throws DataError naming `source` and the 1-based line of the first bad
/// record. Blank lines are skipped.
std::vector<CascadeRecord> read_cascades_jsonl(std::istream& in, std::string_view source);
std::vector<CascadeRecord> read_cascades_jsonl(const std::filesystem::path& path);
std::string to_jsonl_line(const CascadeRecord& record);

enum class GroupBy { kItem, kPublisher };

/// Groups in order of first appearance; cascades keep input order.
std::vector<CascadeGroup> group_records(std::span<const CascadeRecord> records, GroupBy by);

struct ItemFit {
  std::string item_id;
  std::string publisher_id;
  std::int64_t cascade_count = 0;
  BorelMixture borel;
  FitReport bmm_report;
  std::vector<AicEntry> aic;
  std::optional<KernelMixture> kernel;
  std::optional<FitReport> kmm_report;
  /// "ok", "insufficient_data", or "failed: <reason>".
  std::string kmm_status = "ok";
};

struct PublisherEntry {
  std::string publisher_id;
  PublisherModel model;
};

struct ModelFile {
  int schema_version = kSchemaVersion;
  KernelFamily family = KernelFamily::kExponential;
  std::vector<ItemFit> items;
  BinEdges edges;
  std::vector<PublisherEntry> publishers;

  const PublisherEntry* find_publisher(std::string_view id) const;
};

nlohmann::json to_json(const ModelFile& model);
/// Throws DataError on schema violations or a different schema_version.
ModelFile model_from_json(const nlohmann::json& json);
ModelFile read_model(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace dualmix
