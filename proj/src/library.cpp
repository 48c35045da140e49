#include "synthmet/library.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"

namespace synthmet {

namespace {

constexpr std::string_view kKindNames[] = {"correlation", "weibull", "clearness", "ar", "mlp"};

}  // namespace

std::string_view to_string(ModelKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<ModelKind> model_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < std::size(kKindNames); ++i)
    if (kKindNames[i] == name) return static_cast<ModelKind>(i);
  return std::nullopt;
}

std::vector<Quantity> LibraryEntry::inputs() const {
  if (const auto* c = std::get_if<CorrelationModel>(&model)) return c->inputs;
  if (std::holds_alternative<MlpModel>(model)) return {Quantity::ghi, Quantity::wind};
  return {};
}

std::vector<Quantity> LibraryEntry::outputs() const {
  switch (kind()) {
    case ModelKind::correlation: return {std::get<CorrelationModel>(model).output};
    case ModelKind::weibull: return {Quantity::wind};
    case ModelKind::clearness: return {Quantity::kt};
    case ModelKind::mlp: return {Quantity::temp, Quantity::rh};
    case ModelKind::ar: {
      const auto q = quantity_from_name(std::get<ARModel>(model).variable);
      if (q) return {*q};
      return {};
    }
  }
  return {};
}

double LibraryEntry::rank_error() const {
  if (const auto* c = std::get_if<CorrelationModel>(&model)) return c->rmse;
  if (const auto* m = std::get_if<MlpModel>(&model)) return m->validation_rmse;
  return std::numeric_limits<double>::infinity();
}

std::string default_entry_id(const LibraryEntry& e) {
  std::string id(to_string(e.kind()));
  if (const auto* c = std::get_if<CorrelationModel>(&e.model)) id += "-" + c->name;
  if (const auto* a = std::get_if<ARModel>(&e.model)) id += "-" + a->variable;
  if (!e.site.empty()) id += "-" + e.site;
  if (!e.period.empty() && e.period != "all") id += "-" + e.period;
  for (char& c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return id;
}

void to_json(nlohmann::json& j, const LibraryEntry& e) {
  std::visit(
      [&j](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WeibullFit>) {
          j = m.law;
          j["n"] = m.n;
          j["zero_fraction"] = m.zero_fraction;
          j["iterations"] = m.iterations;
          j["log_likelihood"] = m.log_likelihood;
        } else {
          j = m;
        }
      },
      e.model);
  j["kind"] = to_string(e.kind());
  j["id"] = e.id;
  j["site"] = e.site;
  j["period"] = e.period;
}

void from_json(const nlohmann::json& j, LibraryEntry& e) {
  const auto name = j.at("kind").get<std::string>();
  const auto kind = model_kind_from_name(name);
  if (!kind) throw DataError("unknown model kind '" + name + "'");
  e.id = j.at("id").get<std::string>();
  e.site = j.value("site", std::string{});
  e.period = j.value("period", std::string{"all"});
  switch (*kind) {
    case ModelKind::correlation: e.model = j.get<CorrelationModel>(); break;
    case ModelKind::weibull: {
      WeibullFit f;
      f.law = j.get<WeibullLaw>();
      f.n = j.value("n", std::size_t{0});
      f.zero_fraction = j.value("zero_fraction", 0.0);
      f.iterations = j.value("iterations", 0);
      f.log_likelihood = j.value("log_likelihood", 0.0);
      e.model = f;
      break;
    }
    case ModelKind::clearness: e.model = j.get<ClearnessLaw>(); break;
    case ModelKind::ar: e.model = j.get<ARModel>(); break;
    case ModelKind::mlp: e.model = j.get<MlpModel>(); break;
  }
}

const LibraryEntry* ModelRegistry::find(std::string_view id) const {
  for (const auto& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

ModelRegistry ModelRegistry::filter_period(std::string_view period) const {
  ModelRegistry out;
  out.warnings = warnings;
  for (const auto& e : entries)
    if (e.period == period) out.entries.push_back(e);
  return out;
}

std::filesystem::path save_entry(const LibraryEntry& entry, const std::filesystem::path& dir) {
  if (entry.id.empty()) throw PreconditionError("library entry needs an id");
  std::filesystem::create_directories(dir);
  const auto path = dir / (entry.id + ".json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << nlohmann::json(entry).dump(2) << '\n';
  if (!out) throw Error("write failed: " + path.string());
  return path;
}

LibraryEntry load_entry(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  try {
    return nlohmann::json::parse(in).get<LibraryEntry>();
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(file.string() + ": " + ex.what());
  }
}

ModelRegistry load_library(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("model library is not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(dir))
    if (f.is_regular_file() && f.path().extension() == ".json" && !f.path().stem().string().ends_with(".manifest"))
      files.push_back(f.path());
  std::sort(files.begin(), files.end());
  ModelRegistry reg;
  for (const auto& f : files) {
    try {
      reg.entries.push_back(load_entry(f));
    } catch (const Error& ex) {
      reg.warnings.push_back("skipped " + f.filename().string() + ": " + ex.what());
    }
  }
  return reg;
}

}  // namespace synthmet
