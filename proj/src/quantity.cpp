#include "synthmet/quantity.hpp"

#include <array>
#include <utility>

namespace synthmet {

namespace {

constexpr std::array<std::string_view, 12> kNames = {
    "kt", "sunfrac", "kd", "okta", "kt_hourly", "kd_hourly", "ghi", "dhi", "bni", "wind", "temp", "rh"};

}  // namespace

std::string_view to_string(Quantity q) { return kNames[static_cast<std::size_t>(q)]; }

std::optional<Quantity> quantity_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return static_cast<Quantity>(i);
  if (name == "diffuse") return Quantity::dhi;
  if (name == "beam") return Quantity::bni;
  if (name == "temperature") return Quantity::temp;
  if (name == "global") return Quantity::ghi;
  return std::nullopt;
}

bool is_daily(Quantity q) {
  return q == Quantity::kt || q == Quantity::sunfrac || q == Quantity::kd || q == Quantity::okta;
}

std::pair<double, double> quantity_range(Quantity q) {
  switch (q) {
    case Quantity::okta: return {0.0, 8.0};
    case Quantity::ghi:
    case Quantity::dhi:
    case Quantity::bni: return {0.0, 1500.0};
    case Quantity::wind: return {0.0, 75.0};
    case Quantity::temp: return {-40.0, 60.0};
    case Quantity::rh: return {0.0, 100.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace synthmet
