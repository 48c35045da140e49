#pragma once

#include <optional>
#include <string_view>

namespace synthmet {

/// Quantities handled by correlations and the generation cascade. Daily
/// quantities hold one value per day, hourly ones one value per hour.
enum class Quantity {
  kt,         // daily clearness index
  sunfrac,    // daily relative sunshine S/S0
  kd,         // daily diffuse fraction D/G
  okta,       // daily mean nebulosity, octas
  kt_hourly,  // hourly clearness index
  kd_hourly,  // hourly diffuse fraction
  ghi,
  dhi,
  bni,
  wind,
  temp,
  rh,
};

std::string_view to_string(Quantity q);
std::optional<Quantity> quantity_from_name(std::string_view name);
bool is_daily(Quantity q);
/// Physical range used to clamp predictions.
std::pair<double, double> quantity_range(Quantity q);

}  // namespace synthmet
