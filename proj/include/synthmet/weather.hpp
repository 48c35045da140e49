#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synthmet {

/// Hourly variables carried by a weather series.
enum class Variable { temp, rh, wind, wind_dir, ghi, dhi, bni, sunfrac, okta };

inline constexpr std::array<Variable, 9> kAllVariables = {
    Variable::temp, Variable::rh,  Variable::wind,    Variable::wind_dir, Variable::ghi,
    Variable::dhi,  Variable::bni, Variable::sunfrac, Variable::okta};

struct VariableInfo {
  std::string_view column;  // CSV header name
  std::string_view name;    // short name used on the command line
  std::string_view unit;
  double lo;
  double hi;
};

const VariableInfo& info(Variable v);
std::optional<Variable> variable_from_name(std::string_view name);
bool is_radiative(Variable v);

/// Missing cell marker. Every missing value is a quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double x) { return std::isnan(x); }

struct Site {
  std::string name;
  double latitude = 0.0;   // degrees, +N
  double longitude = 0.0;  // degrees, +E
  double altitude = 0.0;   // m
  std::optional<double> pressure;  // Pa; defaults to the standard atmosphere at altitude

  double pressure_pa() const;
  void validate() const;
  bool operator==(const Site&) const = default;
};

/// Hours since 1970-01-01T00:00 local standard time.
using HourStamp = std::int64_t;

struct CivilHour {
  int year;
  int month;
  int day;
  int hour;
};

HourStamp make_stamp(int year, int month, int day, int hour = 0);
CivilHour civil(HourStamp t);
int day_of_year(HourStamp t);
inline HourStamp day_start(HourStamp t) { return t - (((t % 24) + 24) % 24); }
inline int hour_of_day(HourStamp t) { return static_cast<int>(((t % 24) + 24) % 24); }
std::string format_stamp(HourStamp t);   // YYYY-MM-DDTHH:00
std::string format_date(HourStamp t);    // YYYY-MM-DD
std::optional<HourStamp> parse_stamp(std::string_view text);

/// Hourly multivariate series for one site. Hour stamps are strictly increasing;
/// series read from disk or generated are contiguous, period slices may jump
/// between whole days.
class WeatherSeries {
 public:
  WeatherSeries() = default;
  WeatherSeries(Site site, HourStamp start, std::size_t hours);
  WeatherSeries(Site site, std::vector<HourStamp> times);

  const Site& site() const { return site_; }
  void set_site(Site site) { site_ = std::move(site); }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  HourStamp time(std::size_t i) const { return times_[i]; }
  std::span<const HourStamp> times() const { return times_; }
  bool contiguous() const;

  bool has(Variable v) const { return columns_.count(v) != 0; }
  std::span<const double> column(Variable v) const;
  std::span<double> column(Variable v);
  void set_column(Variable v, std::vector<double> values);
  void remove_column(Variable v) { columns_.erase(v); }
  std::vector<Variable> variables() const;

  /// Throws DataError on the first range or ordering violation.
  void validate() const;

  /// Bitwise equality on values (missing == missing) and metadata.
  bool operator==(const WeatherSeries& other) const;

 private:
  Site site_;
  std::vector<HourStamp> times_;
  std::map<Variable, std::vector<double>> columns_;
};

/// Extra trailing columns appended when writing (e.g. derived psychrometrics).
struct ExtraColumn {
  std::string name;
  std::vector<double> values;
};

WeatherSeries parse_weather_csv(const std::filesystem::path& path);
WeatherSeries parse_weather_csv(std::istream& in, const std::string& source = "<stream>");
void write_weather_csv(const WeatherSeries& series, const std::filesystem::path& path,
                       const std::vector<ExtraColumn>& extra = {});
void write_weather_csv(const WeatherSeries& series, std::ostream& out,
                       const std::vector<ExtraColumn>& extra = {});

/// Splits a series at every discontinuity in its hour stamps.
std::vector<WeatherSeries> split_contiguous(const WeatherSeries& series);

// ---------------------------------------------------------------- daily view

struct DayBlock {
  HourStamp day;        // stamp of 00:00
  std::size_t first;    // row of 00:00
};

/// Calendar days present with all 24 hours (values may still be missing).
std::vector<DayBlock> whole_days(const WeatherSeries& series);

/// Whole days with no missing value in any of `vars`.
std::vector<DayBlock> complete_days(const WeatherSeries& series, std::span<const Variable> vars);

enum class IndicatorKind { mean, max, min, amplitude, total };

std::string_view to_string(IndicatorKind k);
std::optional<IndicatorKind> indicator_from_name(std::string_view name);

struct DailyIndicator {
  IndicatorKind kind{};
  Variable variable{};
  std::vector<double> values;
  std::vector<HourStamp> days;
  std::vector<HourStamp> flagged;  // whole or partial days excluded for missing hours
};

double reduce_day(std::span<const double> hours, IndicatorKind kind);
DailyIndicator daily_indicators(const WeatherSeries& series, Variable var, IndicatorKind kind);

WeatherSeries slice_period(const WeatherSeries& series, const std::set<int>& months);

std::set<int> parse_months(std::string_view text);

}  // namespace synthmet
