#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "synthmet/ar.hpp"
#include "synthmet/correlation.hpp"
#include "synthmet/laws.hpp"
#include "synthmet/mlp.hpp"
#include "synthmet/quantity.hpp"

namespace synthmet {

enum class ModelKind { correlation, weibull, clearness, ar, mlp };

std::string_view to_string(ModelKind k);
std::optional<ModelKind> model_kind_from_name(std::string_view name);

using ModelVariant = std::variant<CorrelationModel, WeibullFit, ClearnessLaw, ARModel, MlpModel>;

/// One persisted model with its provenance.
struct LibraryEntry {
  std::string id;
  std::string site;
  std::string period = "all";
  ModelVariant model;

  ModelKind kind() const { return static_cast<ModelKind>(model.index()); }
  /// Quantities consumed and produced in a generation plan. Laws and AR models
  /// have no inputs; an AR model produces the quantity named by its variable.
  std::vector<Quantity> inputs() const;
  std::vector<Quantity> outputs() const;
  /// Recorded fit error used to rank competing producers; +inf when none applies.
  double rank_error() const;
};

std::string default_entry_id(const LibraryEntry& e);

void to_json(nlohmann::json& j, const LibraryEntry& e);
void from_json(const nlohmann::json& j, LibraryEntry& e);

struct ModelRegistry {
  std::vector<LibraryEntry> entries;
  std::vector<std::string> warnings;

  const LibraryEntry* find(std::string_view id) const;
  ModelRegistry filter_period(std::string_view period) const;
};

/// Writes <dir>/<id>.json (creating dir) and returns the path.
std::filesystem::path save_entry(const LibraryEntry& entry, const std::filesystem::path& dir);
LibraryEntry load_entry(const std::filesystem::path& file);
/// Every *.json in dir except run manifests; unreadable or unknown entries are skipped with a warning.
ModelRegistry load_library(const std::filesystem::path& dir);

}  // namespace synthmet
