#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "synthmet/mlp.hpp"
#include "synthmet/weather.hpp"

namespace synthmet {

struct ThermalNode {
  std::string name;
  double capacitance = 0.0;  // J/K
};

struct Coupling {
  std::size_t a = 0;
  std::size_t b = 0;
  double ua = 0.0;  // W/K
};

enum class Boundary { exterior, sky };

struct BoundaryLink {
  std::size_t node = 0;
  Boundary boundary = Boundary::exterior;
  double ua = 0.0;
};

struct SolarSurface {
  std::size_t node = 0;
  double area = 0.0;  // m2
  double absorptivity = 0.0;
  std::string orientation = "horizontal";
};

/// Share of global horizontal radiation reaching a surface: 1 horizontal, 0.5 vertical.
double orientation_factor(const std::string& orientation);

struct ZoneInfo {
  std::string name;
  std::size_t air_node = 0;
  double volume = 0.0;  // m3
  double ach = 0.0;     // air changes per hour with the exterior
};

inline constexpr double kAirDensity = 1.2;  // kg/m3
inline constexpr double kAirCp = 1006.0;    // J/(kg K)

/// Linear thermal network C dT/dt = A T + B. Zone ventilation appears as a
/// boundary link of each zone's air node.
struct NodalModel {
  std::vector<ThermalNode> nodes;
  std::vector<Coupling> couplings;
  std::vector<BoundaryLink> boundary;
  std::vector<SolarSurface> surfaces;
  std::vector<ZoneInfo> zones;

  std::size_t size() const { return nodes.size(); }
  std::size_t node_index(const std::string& name) const;
  Eigen::VectorXd capacitance() const;
  Eigen::MatrixXd conductance() const;  // A
  /// B for one instant; gains holds internal gains per node (W).
  Eigen::VectorXd forcing(double t_ext, double t_sky, double ghi, std::span<const double> gains) const;
  void validate() const;
};

struct LoadItem {
  std::string name;
  int count = 1;
  double sensible = 0.0;  // W each
  double latent = 0.0;    // W each
  std::vector<std::pair<std::string, std::vector<int>>> schedule;  // zone, hours present
};

/// Hourly internal gains per zone, 24-hour periodic.
struct InternalLoadSchedule {
  std::vector<std::array<double, 24>> sensible;
  std::vector<std::array<double, 24>> latent;
  double full_sensible = 0.0;  // every item at once

  static InternalLoadSchedule none(std::size_t zones);
};

InternalLoadSchedule build_schedule(const std::vector<LoadItem>& items, const NodalModel& model);

struct IdealHvac {
  std::vector<int> hours;        // clock hours of operation
  double setpoint = 26.0;        // C
  double setpoint_rh = 60.0;     // %, defines the humidity-ratio setpoint
  double humidity_setpoint = 0.0;  // kg/kg, from setpoint and setpoint_rh at the site pressure

  bool active(int hour) const;
};

IdealHvac make_hvac(std::vector<int> hours, double setpoint, double setpoint_rh, double pressure);

struct Building {
  NodalModel model;
  std::vector<LoadItem> items;
  InternalLoadSchedule loads;
  IdealHvac hvac;
};

Building parse_building(const nlohmann::json& j, double pressure = 101325.0);
Building load_building(const std::filesystem::path& path, double pressure = 101325.0);
/// Editable description of the two-zone collective dwelling.
const std::string& demo_building_json();
Building build_demo_dwelling(double pressure = 101325.0);

struct SimulationOptions {
  int substeps = 4;  // implicit Euler steps per weather hour
};

struct ThermalResult {
  std::vector<HourStamp> times;
  RowMatrix temperatures;  // hours x nodes, end of each hour
  double stored = 0.0;     // J, sum C (T_end - T_0)
  double gross = 0.0;      // J, sum of absolute node exchanges
  double residual = 0.0;   // J, sum |stored - net inflow| over nodes
};

/// Weather needs temperature and relative humidity on every hour; radiation and
/// nebulosity are optional (0 when absent).
ThermalResult simulate_thermal(const NodalModel& model, const WeatherSeries& weather, const InternalLoadSchedule& loads,
                               const SimulationOptions& options = {});

struct DailyLoad {
  HourStamp day = 0;
  double sensible = 0.0;  // kWh
  double latent = 0.0;
  double total = 0.0;
};

struct LoadResult {
  std::vector<DailyLoad> days;
  DailyLoad mean;
  DailyLoad max;  // the day with the largest total
  ThermalResult thermal;
  std::vector<std::vector<std::array<double, 2>>> zone_states;  // per zone, per hour (T, w)
};

LoadResult ideal_hvac_loads(const NodalModel& model, const WeatherSeries& weather, const InternalLoadSchedule& loads,
                            const IdealHvac& hvac, const SimulationOptions& options = {});

std::string loads_csv(const LoadResult& r);

// ---------------------------------------------------------------- comfort

struct ComfortZone {
  std::string name;
  std::string air_speed;
  std::vector<std::array<double, 2>> vertices;  // (T C, w kg/kg)

  void validate() const;
  /// Ray casting; points on the boundary count as inside.
  bool contains(double t, double w) const;
};

std::vector<ComfortZone> default_comfort_zones();
const std::string& default_comfort_json();
std::vector<ComfortZone> parse_comfort_zones(const nlohmann::json& j);
std::vector<ComfortZone> load_comfort_zones(const std::filesystem::path& path);

std::vector<double> comfort_fraction(std::span<const std::array<double, 2>> states, std::span<const ComfortZone> zones);

}  // namespace synthmet
