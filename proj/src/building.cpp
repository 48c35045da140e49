#include "synthmet/building.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"
#include "synthmet/psychro.hpp"

namespace synthmet {

double orientation_factor(const std::string& orientation) {
  if (orientation == "horizontal") return 1.0;
  if (orientation == "vertical" || orientation == "north" || orientation == "south" || orientation == "east" ||
      orientation == "west")
    return 0.5;
  throw DataError("unknown surface orientation '" + orientation + "'");
}

std::size_t NodalModel::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  throw DataError("unknown node '" + name + "'");
}

Eigen::VectorXd NodalModel::capacitance() const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) c(static_cast<Eigen::Index>(i)) = nodes[i].capacitance;
  return c;
}

Eigen::MatrixXd NodalModel::conductance() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& c : couplings) {
    const auto i = static_cast<Eigen::Index>(c.a), j = static_cast<Eigen::Index>(c.b);
    a(i, j) += c.ua;
    a(j, i) += c.ua;
    a(i, i) -= c.ua;
    a(j, j) -= c.ua;
  }
  for (const auto& b : boundary) a(static_cast<Eigen::Index>(b.node), static_cast<Eigen::Index>(b.node)) -= b.ua;
  return a;
}

Eigen::VectorXd NodalModel::forcing(double t_ext, double t_sky, double ghi, std::span<const double> gains) const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (const auto& l : boundary) b(static_cast<Eigen::Index>(l.node)) += l.ua * (l.boundary == Boundary::exterior ? t_ext : t_sky);
  for (const auto& s : surfaces)
    b(static_cast<Eigen::Index>(s.node)) += ghi * s.area * s.absorptivity * orientation_factor(s.orientation);
  for (std::size_t i = 0; i < gains.size() && i < size(); ++i) b(static_cast<Eigen::Index>(i)) += gains[i];
  return b;
}

void NodalModel::validate() const {
  if (nodes.empty()) throw DataError("thermal model has no node");
  for (const auto& n : nodes)
    if (!(n.capacitance > 0.0 && std::isfinite(n.capacitance)))
      throw DataError("node '" + n.name + "' needs a positive capacitance");
  std::vector<std::vector<std::size_t>> adj(size());
  for (const auto& c : couplings) {
    if (c.a >= size() || c.b >= size() || c.a == c.b) throw DataError("coupling references an invalid node pair");
    if (!(c.ua >= 0.0 && std::isfinite(c.ua))) throw DataError("coupling UA must be non-negative");
    if (c.ua > 0.0) {
      adj[c.a].push_back(c.b);
      adj[c.b].push_back(c.a);
    }
  }
  std::vector<char> grounded(size(), 0);
  std::queue<std::size_t> q;
  for (const auto& b : boundary) {
    if (b.node >= size()) throw DataError("boundary link references an invalid node");
    if (!(b.ua >= 0.0 && std::isfinite(b.ua))) throw DataError("boundary UA must be non-negative");
    if (b.ua > 0.0 && !grounded[b.node]) {
      grounded[b.node] = 1;
      q.push(b.node);
    }
  }
  while (!q.empty()) {
    const auto i = q.front();
    q.pop();
    for (auto j : adj[i])
      if (!grounded[j]) {
        grounded[j] = 1;
        q.push(j);
      }
  }
  for (std::size_t i = 0; i < size(); ++i)
    if (!grounded[i]) throw DataError("node '" + nodes[i].name + "' has no path to a boundary temperature");
  for (const auto& s : surfaces) {
    if (s.node >= size()) throw DataError("surface references an invalid node");
    if (!(s.area >= 0.0) || !(s.absorptivity >= 0.0 && s.absorptivity <= 1.0))
      throw DataError("surface area must be non-negative and absorptivity in [0, 1]");
    orientation_factor(s.orientation);
  }
  for (const auto& z : zones)
    if (z.air_node >= size() || !(z.volume >= 0.0) || !(z.ach >= 0.0)) throw DataError("invalid zone '" + z.name + "'");
}

InternalLoadSchedule InternalLoadSchedule::none(std::size_t zones) {
  InternalLoadSchedule s;
  s.sensible.assign(zones, {});
  s.latent.assign(zones, {});
  return s;
}

InternalLoadSchedule build_schedule(const std::vector<LoadItem>& items, const NodalModel& model) {
  auto s = InternalLoadSchedule::none(model.zones.size());
  for (const auto& it : items) {
    if (it.count < 0 || !(it.sensible >= 0.0) || !(it.latent >= 0.0))
      throw DataError("load '" + it.name + "' must be non-negative");
    s.full_sensible += it.count * it.sensible;
    for (const auto& [zone, hours] : it.schedule) {
      std::size_t z = model.zones.size();
      for (std::size_t k = 0; k < model.zones.size(); ++k)
        if (model.zones[k].name == zone) z = k;
      if (z == model.zones.size()) throw DataError("load '" + it.name + "' names unknown zone '" + zone + "'");
      for (int h : hours) {
        if (h < 0 || h > 23) throw DataError("load hours must lie in [0, 23]");
        s.sensible[z][static_cast<std::size_t>(h)] += it.count * it.sensible;
        s.latent[z][static_cast<std::size_t>(h)] += it.count * it.latent;
      }
    }
  }
  return s;
}

bool IdealHvac::active(int hour) const { return std::find(hours.begin(), hours.end(), hour) != hours.end(); }

IdealHvac make_hvac(std::vector<int> hours, double setpoint, double setpoint_rh, double pressure) {
  if (hours.empty()) throw DataError("HVAC schedule is empty");
  for (int h : hours)
    if (h < 0 || h > 23) throw DataError("HVAC hours must lie in [0, 23]");
  IdealHvac hv;
  hv.hours = std::move(hours);
  hv.setpoint = setpoint;
  hv.setpoint_rh = setpoint_rh;
  hv.humidity_setpoint = moist_air_state(setpoint, setpoint_rh, pressure).humidity_ratio;
  return hv;
}

// ---------------------------------------------------------------- building JSON

Building parse_building(const nlohmann::json& j, double pressure) {
  try {
    Building b;
    NodalModel& m = b.model;
    for (const auto& z : j.at("zones")) {
      ZoneInfo zi;
      zi.name = z.at("name").get<std::string>();
      zi.volume = z.value("volume_m3", 0.0);
      zi.ach = z.value("ach", 0.0);
      zi.air_node = m.nodes.size();
      m.nodes.push_back({zi.name, z.at("air_capacitance_JK").get<double>()});
      m.zones.push_back(zi);
    }
    for (const auto& n : j.value("nodes", nlohmann::json::array()))
      m.nodes.push_back({n.at("name").get<std::string>(), n.at("capacitance_JK").get<double>()});
    for (const auto& c : j.at("couplings")) {
      const auto from = c.at("from").get<std::string>();
      const auto to = c.at("to").get<std::string>();
      const double ua = c.at("UA_WK").get<double>();
      auto boundary = [](const std::string& s) -> std::optional<Boundary> {
        if (s == "exterior") return Boundary::exterior;
        if (s == "sky") return Boundary::sky;
        return std::nullopt;
      };
      if (const auto bt = boundary(to))
        m.boundary.push_back({m.node_index(from), *bt, ua});
      else if (const auto bf = boundary(from))
        m.boundary.push_back({m.node_index(to), *bf, ua});
      else
        m.couplings.push_back({m.node_index(from), m.node_index(to), ua});
    }
    for (const auto& z : m.zones) {
      const double ua = kAirDensity * kAirCp * z.volume * z.ach / 3600.0;
      if (ua > 0.0) m.boundary.push_back({z.air_node, Boundary::exterior, ua});
    }
    for (const auto& s : j.value("surfaces", nlohmann::json::array())) {
      const std::string node = s.contains("node") ? s.at("node").get<std::string>() : s.at("zone").get<std::string>();
      m.surfaces.push_back({m.node_index(node), s.at("area_m2").get<double>(), s.at("absorptivity").get<double>(),
                            s.value("orientation", std::string("horizontal"))});
    }
    for (const auto& l : j.value("loads", nlohmann::json::array())) {
      LoadItem it;
      it.name = l.at("name").get<std::string>();
      it.count = l.value("count", 1);
      it.sensible = l.at("sensible_W").get<double>();
      it.latent = l.value("latent_W", 0.0);
      for (const auto& s : l.at("schedule"))
        it.schedule.emplace_back(s.at("zone").get<std::string>(), s.at("hours").get<std::vector<int>>());
      b.items.push_back(std::move(it));
    }
    m.validate();
    b.loads = build_schedule(b.items, m);
    const auto hv = j.value("hvac", nlohmann::json::object());
    b.hvac = make_hvac(hv.value("hours", std::vector<int>{20, 21, 22, 23, 0, 1, 2, 3, 4, 5}), hv.value("setpoint_C", 26.0),
                       hv.value("setpoint_rh_pct", 60.0), pressure);
    return b;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("building description: ") + ex.what());
  }
}

Building load_building(const std::filesystem::path& path, double pressure) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return parse_building(nlohmann::json::parse(in), pressure);
  } catch (const nlohmann::json::parse_error& ex) {
    throw DataError(path.string() + ": " + ex.what());
  }
}

const std::string& demo_building_json() {
  // Top-floor flat, two zones. Roof and wall nodes sit mid-layer; outer films
  // are 20 W/m2K split 3:1 between exterior air and sky for the roof.
  static const std::string text = R"({
  "name": "collective dwelling, top-floor flat",
  "notes": [
    "Roof: concrete 16 cm, R = 0.1 m2K/W, absorptivity 0.7; capacitance 2300 kg/m3 x 880 J/kgK x 0.16 m per m2.",
    "External wall: concrete 20 cm, R = 0.11 m2K/W, absorptivity 0.7.",
    "Internal wall: plasterboard with 5 cm air gap, R = 0.2 m2K/W, modelled as a direct air-to-air conductance.",
    "The R column is read as m2K/W; areas and volumes are editable assumptions.",
    "Air capacitance includes five times the air mass for furniture."
  ],
  "zones": [
    {"name": "living", "air_capacitance_JK": 452700, "volume_m3": 75, "ach": 1.0},
    {"name": "bedroom", "air_capacitance_JK": 377250, "volume_m3": 62.5, "ach": 1.0}
  ],
  "nodes": [
    {"name": "living-roof", "capacitance_JK": 9715200},
    {"name": "bedroom-roof", "capacitance_JK": 8096000},
    {"name": "living-wall", "capacitance_JK": 5262400},
    {"name": "bedroom-wall", "capacitance_JK": 4048000}
  ],
  "couplings": [
    {"from": "living-roof", "to": "living", "UA_WK": 171.43},
    {"from": "living-roof", "to": "exterior", "UA_WK": 225.0},
    {"from": "living-roof", "to": "sky", "UA_WK": 75.0},
    {"from": "bedroom-roof", "to": "bedroom", "UA_WK": 142.86},
    {"from": "bedroom-roof", "to": "exterior", "UA_WK": 187.5},
    {"from": "bedroom-roof", "to": "sky", "UA_WK": 62.5},
    {"from": "living-wall", "to": "living", "UA_WK": 72.22},
    {"from": "living-wall", "to": "exterior", "UA_WK": 123.81},
    {"from": "bedroom-wall", "to": "bedroom", "UA_WK": 55.56},
    {"from": "bedroom-wall", "to": "exterior", "UA_WK": 95.24},
    {"from": "living", "to": "bedroom", "UA_WK": 22.22},
    {"from": "living", "to": "exterior", "UA_WK": 11.6},
    {"from": "bedroom", "to": "exterior", "UA_WK": 11.6}
  ],
  "surfaces": [
    {"node": "living-roof", "area_m2": 30, "absorptivity": 0.7, "orientation": "horizontal"},
    {"node": "bedroom-roof", "area_m2": 25, "absorptivity": 0.7, "orientation": "horizontal"},
    {"node": "living-wall", "area_m2": 13, "absorptivity": 0.7, "orientation": "west"},
    {"node": "bedroom-wall", "area_m2": 10, "absorptivity": 0.7, "orientation": "east"}
  ],
  "loads": [
    {"name": "adult", "count": 2, "sensible_W": 60, "latent_W": 60,
     "schedule": [{"zone": "living", "hours": [18, 19, 20, 21]},
                  {"zone": "bedroom", "hours": [22, 23, 0, 1, 2, 3, 4, 5, 6]}]},
    {"name": "child", "count": 2, "sensible_W": 40, "latent_W": 40,
     "schedule": [{"zone": "living", "hours": [17, 18, 19, 20]},
                  {"zone": "bedroom", "hours": [21, 22, 23, 0, 1, 2, 3, 4, 5, 6]}]},
    {"name": "lighting bedroom 1", "count": 1, "sensible_W": 100, "latent_W": 0,
     "schedule": [{"zone": "bedroom", "hours": [20, 21, 22]}]},
    {"name": "lighting bedroom 2", "count": 1, "sensible_W": 100, "latent_W": 0,
     "schedule": [{"zone": "bedroom", "hours": [20, 21, 22]}]},
    {"name": "lighting living room", "count": 1, "sensible_W": 300, "latent_W": 0,
     "schedule": [{"zone": "living", "hours": [18, 19, 20, 21, 22]}]}
  ],
  "hvac": {"hours": [20, 21, 22, 23, 0, 1, 2, 3, 4, 5], "setpoint_C": 26, "setpoint_rh_pct": 60}
}
)";
  return text;
}

Building build_demo_dwelling(double pressure) { return parse_building(nlohmann::json::parse(demo_building_json()), pressure); }

// ---------------------------------------------------------------- simulation

namespace {

struct Drivers {
  std::vector<double> t_ext, t_sky, ghi, w_ext;
};

Drivers drivers(const WeatherSeries& w) {
  if (w.empty()) throw PreconditionError("simulation needs at least one weather hour");
  if (!w.contiguous()) throw PreconditionError("simulation weather must be hourly contiguous");
  if (!w.has(Variable::temp) || !w.has(Variable::rh))
    throw PreconditionError("simulation weather needs temperature and relative humidity");
  const double p = w.site().pressure_pa();
  Drivers d;
  const auto t = w.column(Variable::temp);
  const auto rh = w.column(Variable::rh);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double ghi = w.has(Variable::ghi) ? w.column(Variable::ghi)[i] : 0.0;
    const double okta = w.has(Variable::okta) ? w.column(Variable::okta)[i] : 0.0;
    if (is_missing(t[i]) || is_missing(rh[i]) || is_missing(ghi) || is_missing(okta))
      throw PreconditionError("weather has a missing driver at " + format_stamp(w.time(i)));
    const double tc = std::clamp(t[i], -40.0, 60.0);
    const auto s = moist_air_state(tc, rh[i], p);
    const double td = s.has_dew_point() ? std::min(s.dew_point, tc) : -40.0;
    d.t_ext.push_back(t[i]);
    d.t_sky.push_back(sky_temperature(tc, td, okta));
    d.ghi.push_back(ghi);
    d.w_ext.push_back(s.humidity_ratio);
  }
  return d;
}

/// Implicit Euler stepping with a subset of air nodes held at a setpoint.
class Stepper {
 public:
  Stepper(const NodalModel& m, double dt) : model_(m), c_dt_(m.capacitance() / dt), a_(m.conductance()), dt_(dt) {
    m_ = Eigen::MatrixXd(c_dt_.asDiagonal()) - a_;
  }

  /// Advances t in place; returns the heat (W) injected at each held node.
  Eigen::VectorXd step(Eigen::VectorXd& t, const Eigen::VectorXd& b, const std::vector<std::size_t>& held, double setpoint) {
    const auto n = static_cast<Eigen::Index>(model_.size());
    std::uint64_t mask = 0;
    for (auto h : held) mask |= std::uint64_t{1} << h;
    auto& lu = factor(mask);
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(mask >> i & 1)) free.push_back(i);
    Eigen::VectorXd next = t;
    for (auto h : held) next(static_cast<Eigen::Index>(h)) = setpoint;
    if (!free.empty()) {
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(free.size()));
      for (std::size_t k = 0; k < free.size(); ++k) {
        const auto i = free[k];
        double r = c_dt_(i) * t(i) + b(i);
        for (auto h : held) r += a_(i, static_cast<Eigen::Index>(h)) * setpoint;
        rhs(static_cast<Eigen::Index>(k)) = r;
      }
      const Eigen::VectorXd x = lu.solve(rhs);
      for (std::size_t k = 0; k < free.size(); ++k) next(free[k]) = x(static_cast<Eigen::Index>(k));
    }
    const Eigen::VectorXd flow = a_ * next + b;
    Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
    for (auto h : held) {
      const auto i = static_cast<Eigen::Index>(h);
      q(i) = c_dt_(i) * (next(i) - t(i)) - flow(i);
    }
    // bookkeeping for the energy balance
    for (Eigen::Index i = 0; i < n; ++i) {
      const double stored = c_dt_(i) * (next(i) - t(i)) * dt_;
      const double inflow = (flow(i) + q(i)) * dt_;
      residual_ += std::abs(stored - inflow);
      gross_ += (std::abs((a_ * next)(i)) + std::abs(b(i)) + std::abs(q(i))) * dt_;
    }
    t = next;
    return q;
  }

  double residual() const { return residual_; }
  double gross() const { return gross_; }

 private:
  Eigen::PartialPivLU<Eigen::MatrixXd>& factor(std::uint64_t mask) {
    auto it = cache_.find(mask);
    if (it != cache_.end()) return it->second;
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      if (!(mask >> i & 1)) free.push_back(i);
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(free.size()), static_cast<Eigen::Index>(free.size()));
    for (std::size_t r = 0; r < free.size(); ++r)
      for (std::size_t c = 0; c < free.size(); ++c)
        sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m_(free[r], free[c]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    if (sub.size() > 0) {
      lu.compute(sub);
      if (!(std::abs(lu.determinant()) > 0.0) || !std::isfinite(lu.determinant()))
        throw NumericalError("singular thermal step matrix");
    }
    return cache_.emplace(mask, std::move(lu)).first->second;
  }

  const NodalModel& model_;
  Eigen::VectorXd c_dt_;
  Eigen::MatrixXd a_;
  Eigen::MatrixXd m_;
  double dt_;
  std::map<std::uint64_t, Eigen::PartialPivLU<Eigen::MatrixXd>> cache_;
  double residual_ = 0.0;
  double gross_ = 0.0;
};

std::vector<double> node_gains(const NodalModel& model, const InternalLoadSchedule& loads, int hour) {
  std::vector<double> g(model.size(), 0.0);
  for (std::size_t z = 0; z < model.zones.size() && z < loads.sensible.size(); ++z)
    g[model.zones[z].air_node] += loads.sensible[z][static_cast<std::size_t>(hour)];
  return g;
}

struct RunOutput {
  ThermalResult thermal;
  std::vector<std::vector<double>> cooling_wh;  // per hour, per zone
};

RunOutput run(const NodalModel& model, const WeatherSeries& weather, const InternalLoadSchedule& loads,
              const IdealHvac* hvac, const SimulationOptions& options) {
  model.validate();
  if (model.size() > 64) throw PreconditionError("thermal model limited to 64 nodes");
  if (options.substeps < 1) throw PreconditionError("substeps must be at least 1");
  if (loads.sensible.size() != model.zones.size()) throw PreconditionError("load schedule does not match the zones");
  const auto d = drivers(weather);
  const double dt = 3600.0 / options.substeps;
  Stepper stepper(model, dt);
  const Eigen::VectorXd cap = model.capacitance();

  RunOutput out;
  auto& r = out.thermal;
  r.times.assign(weather.times().begin(), weather.times().end());
  r.temperatures.resize(static_cast<Eigen::Index>(weather.size()), static_cast<Eigen::Index>(model.size()));
  Eigen::VectorXd t = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(model.size()), d.t_ext.front());
  const Eigen::VectorXd t0 = t;

  for (std::size_t k = 0; k < weather.size(); ++k) {
    const int hour = hour_of_day(weather.time(k));
    const auto gains = node_gains(model, loads, hour);
    const Eigen::VectorXd b = model.forcing(d.t_ext[k], d.t_sky[k], d.ghi[k], gains);
    std::vector<double> cooling(model.zones.size(), 0.0);
    const bool on = hvac && hvac->active(hour);
    for (int s = 0; s < options.substeps; ++s) {
      if (!on) {
        stepper.step(t, b, {}, 0.0);
        continue;
      }
      // held set: zones that need cooling to stay at the setpoint
      std::vector<char> hold(model.zones.size(), 1);
      Eigen::VectorXd trial, q;
      for (std::size_t iter = 0; iter < 2 * model.zones.size() + 2; ++iter) {
        std::vector<std::size_t> held;
        for (std::size_t z = 0; z < model.zones.size(); ++z)
          if (hold[z]) held.push_back(model.zones[z].air_node);
        trial = t;
        Stepper probe = stepper;
        q = probe.step(trial, b, held, hvac->setpoint);
        bool changed = false;
        for (std::size_t z = 0; z < model.zones.size(); ++z) {
          const auto i = static_cast<Eigen::Index>(model.zones[z].air_node);
          if (hold[z] && q(i) > 1e-9) hold[z] = 0, changed = true;
          else if (!hold[z] && trial(i) > hvac->setpoint + 1e-9) hold[z] = 1, changed = true;
        }
        if (!changed) break;
      }
      std::vector<std::size_t> held;
      for (std::size_t z = 0; z < model.zones.size(); ++z)
        if (hold[z]) held.push_back(model.zones[z].air_node);
      q = stepper.step(t, b, held, hvac->setpoint);
      for (std::size_t z = 0; z < model.zones.size(); ++z)
        cooling[z] += std::max(0.0, -q(static_cast<Eigen::Index>(model.zones[z].air_node))) * dt / 3600.0;
    }
    r.temperatures.row(static_cast<Eigen::Index>(k)) = t.transpose();
    out.cooling_wh.push_back(std::move(cooling));
  }
  r.stored = (cap.array() * (t - t0).array()).sum();
  r.gross = stepper.gross();
  r.residual = stepper.residual();
  return out;
}

}  // namespace

ThermalResult simulate_thermal(const NodalModel& model, const WeatherSeries& weather, const InternalLoadSchedule& loads,
                               const SimulationOptions& options) {
  return run(model, weather, loads, nullptr, options).thermal;
}

LoadResult ideal_hvac_loads(const NodalModel& model, const WeatherSeries& weather, const InternalLoadSchedule& loads,
                            const IdealHvac& hvac, const SimulationOptions& options) {
  if (hvac.hours.empty()) throw PreconditionError("HVAC schedule is empty");
  auto out = run(model, weather, loads, &hvac, options);
  const auto d = drivers(weather);

  LoadResult r;
  r.zone_states.assign(model.zones.size(), {});
  for (std::size_t k = 0; k < weather.size(); ++k) {
    const HourStamp day = day_start(weather.time(k));
    if (r.days.empty() || r.days.back().day != day) r.days.push_back({day, 0.0, 0.0, 0.0});
    auto& dl = r.days.back();
    const int hour = hour_of_day(weather.time(k));
    const bool on = hvac.active(hour);
    for (std::size_t z = 0; z < model.zones.size(); ++z) {
      const auto& zone = model.zones[z];
      dl.sensible += out.cooling_wh[k][z] / 1000.0;
      double w_in = d.w_ext[k];
      if (on) {
        const double air_kg_per_h = kAirDensity * zone.volume * zone.ach;
        const double excess = std::max(0.0, d.w_ext[k] - hvac.humidity_setpoint);
        const double latent_wh = air_kg_per_h * excess * kLatentHeat / 3.6 + loads.latent[z][static_cast<std::size_t>(hour)];
        dl.latent += latent_wh / 1000.0;
        w_in = std::min(w_in, hvac.humidity_setpoint);
      }
      r.zone_states[z].push_back({out.thermal.temperatures(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(zone.air_node)), w_in});
    }
  }
  double s = 0.0, l = 0.0;
  for (auto& dl : r.days) {
    dl.total = dl.sensible + dl.latent;
    s += dl.sensible;
    l += dl.latent;
    if (dl.total > r.max.total || &dl == &r.days.front()) r.max = dl;
  }
  if (!r.days.empty()) {
    const double n = static_cast<double>(r.days.size());
    r.mean = {0, s / n, l / n, s / n + l / n};
  }
  r.thermal = std::move(out.thermal);
  return r;
}

std::string loads_csv(const LoadResult& r) {
  std::ostringstream out;
  out << "date,sensible_kWh,latent_kWh,total_kWh\n";
  for (const auto& d : r.days) out << format_date(d.day) << ',' << d.sensible << ',' << d.latent << ',' << d.total << '\n';
  out << "MEAN," << r.mean.sensible << ',' << r.mean.latent << ',' << r.mean.total << '\n';
  out << "MAX," << r.max.sensible << ',' << r.max.latent << ',' << r.max.total << '\n';
  return out.str();
}

// ---------------------------------------------------------------- comfort

namespace {

// humidity ratio is scaled to g/kg so both axes have comparable magnitude
constexpr double kWScale = 1000.0;
constexpr double kEdgeTol = 1e-9;

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

bool on_segment(double px, double py, double ax, double ay, double bx, double by) {
  if (std::abs(cross(bx - ax, by - ay, px - ax, py - ay)) > kEdgeTol * (1.0 + std::hypot(bx - ax, by - ay))) return false;
  return px >= std::min(ax, bx) - kEdgeTol && px <= std::max(ax, bx) + kEdgeTol && py >= std::min(ay, by) - kEdgeTol &&
         py <= std::max(ay, by) + kEdgeTol;
}

bool segments_cross(std::array<double, 2> a, std::array<double, 2> b, std::array<double, 2> c, std::array<double, 2> d) {
  auto orient = [](std::array<double, 2> p, std::array<double, 2> q, std::array<double, 2> r) {
    const double v = cross(q[0] - p[0], q[1] - p[1], r[0] - p[0], r[1] - p[1]);
    return (v > 1e-12) - (v < -1e-12);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(c[0], c[1], a[0], a[1], b[0], b[1])) return true;
  if (o2 == 0 && on_segment(d[0], d[1], a[0], a[1], b[0], b[1])) return true;
  if (o3 == 0 && on_segment(a[0], a[1], c[0], c[1], d[0], d[1])) return true;
  if (o4 == 0 && on_segment(b[0], b[1], c[0], c[1], d[0], d[1])) return true;
  return false;
}

}  // namespace

void ComfortZone::validate() const {
  const std::size_t n = vertices.size();
  if (n < 3) throw PreconditionError("comfort zone '" + name + "' needs at least 3 vertices");
  std::vector<std::array<double, 2>> p;
  for (const auto& v : vertices) p.push_back({v[0], v[1] * kWScale});
  double area = 0.0;
  for (std::size_t i = 0; i < n; ++i) area += cross(p[i][0], p[i][1], p[(i + 1) % n][0], p[(i + 1) % n][1]);
  if (std::abs(area) < 1e-12) throw PreconditionError("comfort zone '" + name + "' is degenerate (zero area)");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n]))
        throw PreconditionError("comfort zone '" + name + "' is self-intersecting");
    }
}

bool ComfortZone::contains(double t, double w) const {
  const std::size_t n = vertices.size();
  const double py = w * kWScale;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = vertices[i][0], yi = vertices[i][1] * kWScale;
    const double xj = vertices[j][0], yj = vertices[j][1] * kWScale;
    if (on_segment(t, py, xi, yi, xj, yj)) return true;
    if ((yi > py) != (yj > py) && t < (xj - xi) * (py - yi) / (yj - yi) + xi) inside = !inside;
  }
  return inside;
}

const std::string& default_comfort_json() {
  static const std::string text = R"({
  "notes": [
    "Vertices are (dry-bulb C, humidity ratio kg/kg) at standard pressure.",
    "Givoni zones follow the still-air and 1.5 m/s extents of the building bioclimatic chart.",
    "ASHRAE summer band: 22.8 to 26.1 C, RH at most 60 % (upper edge as a chord of the 60 % curve)."
  ],
  "zones": [
    {"name": "givoni-1", "air_speed": "still air",
     "vertices": [[20, 0.0030], [27, 0.0045], [27, 0.0120], [25, 0.0150], [20, 0.0120]]},
    {"name": "givoni-2", "air_speed": "up to 1.5 m/s",
     "vertices": [[20, 0.0030], [32, 0.0060], [32, 0.0140], [28, 0.0190], [20, 0.0140]]},
    {"name": "ashrae-summer", "air_speed": "still air",
     "vertices": [[22.8, 0.0], [26.1, 0.0], [26.1, 0.012685], [22.8, 0.010373]]}
  ]
}
)";
  return text;
}

std::vector<ComfortZone> parse_comfort_zones(const nlohmann::json& j) {
  try {
    std::vector<ComfortZone> out;
    for (const auto& z : j.at("zones")) {
      ComfortZone c;
      c.name = z.at("name").get<std::string>();
      c.air_speed = z.value("air_speed", std::string{});
      for (const auto& v : z.at("vertices")) c.vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
      c.validate();
      out.push_back(std::move(c));
    }
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("comfort zones: ") + ex.what());
  } catch (const PreconditionError& ex) {
    throw DataError(ex.what());
  }
}

std::vector<ComfortZone> default_comfort_zones() { return parse_comfort_zones(nlohmann::json::parse(default_comfort_json())); }

std::vector<ComfortZone> load_comfort_zones(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return parse_comfort_zones(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& ex) {
    throw DataError(path.string() + ": " + ex.what());
  }
}

std::vector<double> comfort_fraction(std::span<const std::array<double, 2>> states, std::span<const ComfortZone> zones) {
  if (states.empty()) throw PreconditionError("comfort fraction needs at least one state");
  std::vector<double> out;
  for (const auto& z : zones) {
    z.validate();
    std::size_t inside = 0;
    for (const auto& s : states) inside += z.contains(s[0], s[1]) ? 1 : 0;
    out.push_back(static_cast<double>(inside) / static_cast<double>(states.size()));
  }
  return out;
}

}  // namespace synthmet
