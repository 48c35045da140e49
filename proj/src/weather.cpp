#include "synthmet/weather.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>

#include "synthmet/error.hpp"

namespace synthmet {

namespace {

constexpr std::array<VariableInfo, 9> kInfo = {{
    {"temp_C", "temp", "degC", -60.0, 60.0},
    {"rh_pct", "rh", "%", 0.0, 100.0},
    {"wind_ms", "wind", "m/s", 0.0, 75.0},
    {"winddir_deg", "winddir", "deg", 0.0, 360.0},
    {"ghi_Whm2", "ghi", "Wh/m2", 0.0, 1500.0},
    {"dhi_Whm2", "dhi", "Wh/m2", 0.0, 1500.0},
    {"bni_Whm2", "bni", "Wh/m2", 0.0, 1500.0},
    {"sunfrac", "sunfrac", "-", 0.0, 1.0},
    {"okta", "okta", "octa", 0.0, 8.0},
}};

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

void append_number(std::string& out, double v) {
  if (is_missing(v)) return;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

std::string_view chomp(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

const VariableInfo& info(Variable v) { return kInfo[static_cast<std::size_t>(v)]; }

std::optional<Variable> variable_from_name(std::string_view name) {
  for (Variable v : kAllVariables) {
    if (info(v).name == name || info(v).column == name) return v;
  }
  if (name == "temperature") return Variable::temp;
  if (name == "diffuse") return Variable::dhi;
  if (name == "beam") return Variable::bni;
  if (name == "global") return Variable::ghi;
  return std::nullopt;
}

bool is_radiative(Variable v) {
  return v == Variable::ghi || v == Variable::dhi || v == Variable::bni || v == Variable::sunfrac;
}

double Site::pressure_pa() const {
  if (pressure) return *pressure;
  return 101325.0 * std::pow(1.0 - 2.25577e-5 * altitude, 5.25588);
}

void Site::validate() const {
  if (!(latitude >= -90.0 && latitude <= 90.0))
    throw DataError("site latitude outside [-90, 90]: " + std::to_string(latitude));
  if (!(longitude >= -180.0 && longitude <= 180.0))
    throw DataError("site longitude outside [-180, 180]: " + std::to_string(longitude));
  if (!(altitude >= -500.0 && altitude <= 9000.0))
    throw DataError("site altitude outside [-500, 9000]: " + std::to_string(altitude));
  if (pressure && !(*pressure > 0.0)) throw DataError("site pressure must be positive");
}

// ---------------------------------------------------------------- calendar

HourStamp make_stamp(int year, int month, int day, int hour) {
  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour < 0 || hour > 23) throw DataError("invalid calendar date");
  return static_cast<HourStamp>(sys_days{ymd}.time_since_epoch().count()) * 24 + hour;
}

CivilHour civil(HourStamp t) {
  using namespace std::chrono;
  const HourStamp d = (t - hour_of_day(t)) / 24;
  const year_month_day ymd{sys_days{days{d}}};
  return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
          static_cast<int>(static_cast<unsigned>(ymd.day())), hour_of_day(t)};
}

int day_of_year(HourStamp t) {
  const CivilHour c = civil(t);
  return static_cast<int>((day_start(t) - make_stamp(c.year, 1, 1)) / 24) + 1;
}

std::string format_stamp(HourStamp t) {
  const CivilHour c = civil(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00", c.year, c.month, c.day, c.hour);
  return buf;
}

std::string format_date(HourStamp t) { return format_stamp(t).substr(0, 10); }

std::optional<HourStamp> parse_stamp(std::string_view s) {
  // YYYY-MM-DDTHH:00
  if (s.size() != 16 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s.substr(14) != "00")
    return std::nullopt;
  auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc() || ptr != s.data() + pos + len) return std::nullopt;
    return v;
  };
  auto y = num(0, 4), m = num(5, 2), d = num(8, 2), h = num(11, 2);
  if (!y || !m || !d || !h) return std::nullopt;
  try {
    return make_stamp(*y, *m, *d, *h);
  } catch (const DataError&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------- series

WeatherSeries::WeatherSeries(Site site, HourStamp start, std::size_t hours) : site_(std::move(site)) {
  times_.resize(hours);
  for (std::size_t i = 0; i < hours; ++i) times_[i] = start + static_cast<HourStamp>(i);
}

WeatherSeries::WeatherSeries(Site site, std::vector<HourStamp> times)
    : site_(std::move(site)), times_(std::move(times)) {
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (times_[i] <= times_[i - 1]) throw DataError("hour stamps must be strictly increasing");
}

bool WeatherSeries::contiguous() const {
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (times_[i] != times_[i - 1] + 1) return false;
  return true;
}

std::span<const double> WeatherSeries::column(Variable v) const {
  auto it = columns_.find(v);
  if (it == columns_.end()) throw PreconditionError("series has no column " + std::string(info(v).name));
  return it->second;
}

std::span<double> WeatherSeries::column(Variable v) {
  auto it = columns_.find(v);
  if (it == columns_.end()) throw PreconditionError("series has no column " + std::string(info(v).name));
  return it->second;
}

void WeatherSeries::set_column(Variable v, std::vector<double> values) {
  if (values.size() != times_.size())
    throw PreconditionError("column length " + std::to_string(values.size()) +
                            " does not match series length " + std::to_string(times_.size()));
  columns_[v] = std::move(values);
}

std::vector<Variable> WeatherSeries::variables() const {
  std::vector<Variable> out;
  for (const auto& [v, _] : columns_) out.push_back(v);
  return out;
}

void WeatherSeries::validate() const {
  site_.validate();
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (times_[i] <= times_[i - 1]) throw DataError("hour stamps not strictly increasing at row " + std::to_string(i + 1));
  for (const auto& [v, col] : columns_) {
    const auto& vi = info(v);
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double x = col[i];
      if (is_missing(x)) continue;
      if (!(x >= vi.lo && x <= vi.hi))
        throw DataError("row " + std::to_string(i + 1) + ": " + std::string(vi.column) + " = " +
                        std::to_string(x) + " outside [" + std::to_string(vi.lo) + ", " +
                        std::to_string(vi.hi) + "]");
    }
  }
}

bool WeatherSeries::operator==(const WeatherSeries& other) const {
  if (!(site_ == other.site_) || times_ != other.times_) return false;
  if (columns_.size() != other.columns_.size()) return false;
  for (const auto& [v, col] : columns_) {
    auto it = other.columns_.find(v);
    if (it == other.columns_.end()) return false;
    const auto& rhs = it->second;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (is_missing(col[i]) && is_missing(rhs[i])) continue;
      if (std::memcmp(&col[i], &rhs[i], sizeof(double)) != 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- CSV

WeatherSeries parse_weather_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open weather file " + path.string());
  return parse_weather_csv(in, path.string());
}

WeatherSeries parse_weather_csv(std::istream& in, const std::string& source) {
  auto fail = [&](const std::string& msg) -> DataError { return DataError(source + ": " + msg); };
  std::string line;
  auto next_line = [&](const char* what) -> std::string_view {
    if (!std::getline(in, line)) throw fail(std::string("missing header line: ") + what);
    return chomp(line);
  };

  Site site;
  {
    const auto f = split(next_line("#site"), ',');
    if (f.size() < 8 || f[0] != "#site" || f[2] != "lat" || f[4] != "lon" || f[6] != "alt" ||
        (f.size() != 8 && f.size() != 10) || (f.size() == 10 && f[8] != "pres"))
      throw fail("malformed header line 1, expected #site,<name>,lat,<deg>,lon,<deg>,alt,<m>");
    site.name = std::string(f[1]);
    auto lat = to_double(f[3]), lon = to_double(f[5]), alt = to_double(f[7]);
    if (!lat || !lon || !alt) throw fail("malformed numbers in #site header");
    site.latitude = *lat;
    site.longitude = *lon;
    site.altitude = *alt;
    if (f.size() == 10) {
      auto p = to_double(f[9]);
      if (!p) throw fail("malformed pressure in #site header");
      site.pressure = *p;
    }
    try {
      site.validate();
    } catch (const DataError& e) {
      throw fail(e.what());
    }
  }
  HourStamp start = 0;
  {
    const auto f = split(next_line("#start"), ',');
    if (f.size() != 2 || f[0] != "#start") throw fail("malformed header line 2, expected #start,<YYYY-MM-DDTHH:00>");
    auto t = parse_stamp(f[1]);
    if (!t) throw fail("malformed #start timestamp");
    start = *t;
  }
  if (next_line("#step") != "#step,1h") throw fail("malformed header line 3, expected #step,1h");
  const auto header = split(next_line("column header"), ',');
  if (header.size() < 1 + kAllVariables.size() || header[0] != "timestamp")
    throw fail("malformed column header");
  for (std::size_t c = 0; c < kAllVariables.size(); ++c)
    if (header[c + 1] != info(kAllVariables[c]).column)
      throw fail("unexpected column '" + std::string(header[c + 1]) + "', expected '" +
                 std::string(info(kAllVariables[c]).column) + "'");

  std::array<std::vector<double>, 9> cols;
  std::vector<HourStamp> times;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const std::string_view l = chomp(line);
    if (l.empty()) continue;
    ++row;
    const std::string where = "row " + std::to_string(row) + " (line " + std::to_string(row + 4) + ")";
    const auto f = split(l, ',');
    if (f.size() != header.size())
      throw fail(where + ": expected " + std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
    auto t = parse_stamp(f[0]);
    if (!t) throw fail(where + ": malformed timestamp '" + std::string(f[0]) + "'");
    const HourStamp expected = start + static_cast<HourStamp>(row - 1);
    if (*t != expected)
      throw fail(where + ": hourly gap, expected " + format_stamp(expected) + " but found " + format_stamp(*t));
    times.push_back(*t);
    for (std::size_t c = 0; c < kAllVariables.size(); ++c) {
      const auto field = f[c + 1];
      if (field.empty()) {
        cols[c].push_back(kMissing);
        continue;
      }
      auto v = to_double(field);
      const auto& vi = info(kAllVariables[c]);
      if (!v || std::isnan(*v)) throw fail(where + ": malformed number in " + std::string(vi.column));
      if (!(*v >= vi.lo && *v <= vi.hi))
        throw fail(where + ": " + std::string(vi.column) + " = " + std::string(field) + " outside physical range [" +
                   std::to_string(vi.lo) + ", " + std::to_string(vi.hi) + "]");
      cols[c].push_back(*v);
    }
  }
  if (times.empty()) throw fail("no data rows");

  WeatherSeries series(site, std::move(times));
  for (std::size_t c = 0; c < kAllVariables.size(); ++c) {
    const bool any = std::any_of(cols[c].begin(), cols[c].end(), [](double x) { return !is_missing(x); });
    if (any) series.set_column(kAllVariables[c], std::move(cols[c]));
  }
  return series;
}

void write_weather_csv(const WeatherSeries& series, const std::filesystem::path& path,
                       const std::vector<ExtraColumn>& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write weather file " + path.string());
  write_weather_csv(series, out, extra);
  if (!out) throw DataError("I/O failure writing " + path.string());
}

void write_weather_csv(const WeatherSeries& series, std::ostream& out, const std::vector<ExtraColumn>& extra) {
  if (series.empty()) throw PreconditionError("cannot write an empty series");
  if (!series.contiguous())
    throw PreconditionError("series is not hourly-contiguous; write each contiguous segment separately");
  const Site& site = series.site();
  if (site.name.find_first_of(",\n\r") != std::string::npos)
    throw PreconditionError("site name must not contain commas or line breaks");
  for (const auto& x : extra)
    if (x.values.size() != series.size()) throw PreconditionError("extra column length mismatch: " + x.name);

  std::string buf;
  buf += "#site,";
  buf += site.name;
  buf += ",lat,";
  append_number(buf, site.latitude);
  buf += ",lon,";
  append_number(buf, site.longitude);
  buf += ",alt,";
  append_number(buf, site.altitude);
  if (site.pressure) {
    buf += ",pres,";
    append_number(buf, *site.pressure);
  }
  buf += "\n#start,";
  buf += format_stamp(series.time(0));
  buf += "\n#step,1h\ntimestamp";
  for (Variable v : kAllVariables) {
    buf += ',';
    buf += info(v).column;
  }
  for (const auto& x : extra) {
    buf += ',';
    buf += x.name;
  }
  buf += '\n';

  std::array<std::span<const double>, 9> cols{};
  for (std::size_t c = 0; c < kAllVariables.size(); ++c)
    if (series.has(kAllVariables[c])) cols[c] = series.column(kAllVariables[c]);

  for (std::size_t i = 0; i < series.size(); ++i) {
    buf += format_stamp(series.time(i));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      buf += ',';
      if (!cols[c].empty()) append_number(buf, cols[c][i]);
    }
    for (const auto& x : extra) {
      buf += ',';
      append_number(buf, x.values[i]);
    }
    buf += '\n';
    if (buf.size() > (1u << 16)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

std::vector<WeatherSeries> split_contiguous(const WeatherSeries& series) {
  std::vector<WeatherSeries> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= series.size(); ++i) {
    if (i < series.size() && series.time(i) == series.time(i - 1) + 1) continue;
    WeatherSeries part(series.site(), series.time(begin), i - begin);
    for (Variable v : series.variables()) {
      auto col = series.column(v);
      part.set_column(v, std::vector<double>(col.begin() + static_cast<std::ptrdiff_t>(begin),
                                             col.begin() + static_cast<std::ptrdiff_t>(i)));
    }
    out.push_back(std::move(part));
    begin = i;
  }
  return out;
}

// ---------------------------------------------------------------- daily view

std::vector<DayBlock> whole_days(const WeatherSeries& series) {
  std::vector<DayBlock> out;
  const auto t = series.times();
  std::size_t i = 0;
  while (i < t.size()) {
    if (hour_of_day(t[i]) == 0 && i + 23 < t.size() && t[i + 23] == t[i] + 23) {
      out.push_back({t[i], i});
      i += 24;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<DayBlock> complete_days(const WeatherSeries& series, std::span<const Variable> vars) {
  std::vector<DayBlock> out;
  for (const DayBlock& d : whole_days(series)) {
    bool ok = true;
    for (Variable v : vars) {
      if (!series.has(v)) {
        ok = false;
        break;
      }
      auto col = series.column(v);
      for (std::size_t h = 0; h < 24 && ok; ++h) ok = !is_missing(col[d.first + h]);
      if (!ok) break;
    }
    if (ok) out.push_back(d);
  }
  return out;
}

std::string_view to_string(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::mean: return "mean";
    case IndicatorKind::max: return "max";
    case IndicatorKind::min: return "min";
    case IndicatorKind::amplitude: return "amplitude";
    case IndicatorKind::total: return "daily-total";
  }
  return "?";
}

std::optional<IndicatorKind> indicator_from_name(std::string_view n) {
  if (n == "mean") return IndicatorKind::mean;
  if (n == "max") return IndicatorKind::max;
  if (n == "min") return IndicatorKind::min;
  if (n == "amplitude" || n == "amp") return IndicatorKind::amplitude;
  if (n == "daily-total" || n == "total") return IndicatorKind::total;
  return std::nullopt;
}

double reduce_day(std::span<const double> hours, IndicatorKind kind) {
  const auto [lo, hi] = std::minmax_element(hours.begin(), hours.end());
  double sum = 0.0;
  for (double x : hours) sum += x;
  switch (kind) {
    case IndicatorKind::mean: return sum / static_cast<double>(hours.size());
    case IndicatorKind::max: return *hi;
    case IndicatorKind::min: return *lo;
    case IndicatorKind::amplitude: return *hi - *lo;
    case IndicatorKind::total: return sum;
  }
  return kMissing;
}

DailyIndicator daily_indicators(const WeatherSeries& series, Variable var, IndicatorKind kind) {
  if (!series.has(var)) throw PreconditionError("variable " + std::string(info(var).name) + " absent from series");
  if (kind == IndicatorKind::total && !is_radiative(var))
    throw PreconditionError("daily-total is only defined for radiation and insolation");
  DailyIndicator out;
  out.kind = kind;
  out.variable = var;
  const auto col = series.column(var);
  const auto days = whole_days(series);
  std::set<HourStamp> seen;
  for (const DayBlock& d : days) {
    seen.insert(d.day);
    const auto hours = col.subspan(d.first, 24);
    if (std::any_of(hours.begin(), hours.end(), is_missing)) {
      out.flagged.push_back(d.day);
      continue;
    }
    out.values.push_back(reduce_day(hours, kind));
    out.days.push_back(d.day);
  }
  // partial days at the series edges or around jumps
  for (HourStamp t : series.times()) {
    const HourStamp d = day_start(t);
    if (seen.insert(d).second) out.flagged.push_back(d);
  }
  std::sort(out.flagged.begin(), out.flagged.end());
  if (out.values.empty()) throw DataError("no complete day for " + std::string(info(var).name));
  return out;
}

WeatherSeries slice_period(const WeatherSeries& series, const std::set<int>& months) {
  if (months.empty()) throw PreconditionError("month set is empty");
  std::vector<HourStamp> times;
  std::vector<std::size_t> rows;
  for (const DayBlock& d : whole_days(series)) {
    if (!months.count(civil(d.day).month)) continue;
    for (std::size_t h = 0; h < 24; ++h) {
      times.push_back(series.time(d.first + h));
      rows.push_back(d.first + h);
    }
  }
  if (times.empty()) throw DataError("period slice is empty");
  WeatherSeries out(series.site(), std::move(times));
  for (Variable v : series.variables()) {
    const auto col = series.column(v);
    std::vector<double> values;
    values.reserve(rows.size());
    for (std::size_t r : rows) values.push_back(col[r]);
    out.set_column(v, std::move(values));
  }
  return out;
}

std::set<int> parse_months(std::string_view text) {
  std::set<int> out;
  for (auto part : split(text, ',')) {
    int m = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), m);
    if (ec != std::errc() || ptr != part.data() + part.size() || m < 1 || m > 12)
      throw PreconditionError("invalid month '" + std::string(part) + "'");
    out.insert(m);
  }
  return out;
}

}  // namespace synthmet
