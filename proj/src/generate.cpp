#include "synthmet/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"
#include "synthmet/solar.hpp"

namespace synthmet {

namespace {

constexpr double kEnvelopeKt = 0.85;
constexpr double kGhiPhi = 0.6;
constexpr double kGhiSd = 0.15;  // stationary sd of the multiplicative perturbation
constexpr int kMaxIterations = 50;

struct Producer {
  StepKind kind;
  std::string name;
  std::vector<Quantity> inputs;
  std::vector<Quantity> outputs;
  std::vector<std::size_t> entries;
  double rank_error = 0.0;
};

std::vector<Producer> producers(const ModelRegistry& reg) {
  using Q = Quantity;
  std::vector<Producer> out = {
      {StepKind::root, "clearness-root", {}, {Q::kt}, {}, 0.0},
      {StepKind::root, "wind-root", {}, {Q::wind}, {}, 0.0},
      {StepKind::builtin, "hourly_profile", {Q::kt}, {Q::ghi}, {}, 0.0},
      {StepKind::builtin, "hourly_kt", {Q::ghi}, {Q::kt_hourly}, {}, 0.0},
      {StepKind::builtin, "diffuse_split", {Q::kd, Q::ghi}, {Q::dhi}, {}, 0.0},
      {StepKind::builtin, "diffuse_split_hourly", {Q::kd_hourly, Q::ghi}, {Q::dhi}, {}, 0.0},
      {StepKind::builtin, "beam", {Q::ghi, Q::dhi}, {Q::bni}, {}, 0.0},
  };
  for (std::size_t i = 0; i < reg.entries.size(); ++i) {
    const auto& e = reg.entries[i];
    const auto kind = e.kind();
    const auto outs = e.outputs();
    if (outs.empty()) continue;
    const bool fallback_ar = kind == ModelKind::ar && (outs[0] == Q::temp || outs[0] == Q::rh);
    if (kind == ModelKind::correlation || kind == ModelKind::mlp || fallback_ar)
      out.push_back({StepKind::model, e.id, e.inputs(), outs, {i}, e.rank_error()});
  }
  // roots draw on the laws and AR models of their quantity
  for (std::size_t i = 0; i < reg.entries.size(); ++i) {
    const auto& e = reg.entries[i];
    const auto outs = e.outputs();
    if (outs.empty()) continue;
    const bool law = e.kind() == ModelKind::clearness || e.kind() == ModelKind::weibull;
    const bool ar = e.kind() == ModelKind::ar;
    if (!law && !ar) continue;
    if (outs[0] == Q::kt) out[0].entries.push_back(i);
    if (outs[0] == Q::wind) out[1].entries.push_back(i);
  }
  return out;
}

bool contains(const std::set<Quantity>& s, const std::vector<Quantity>& qs) {
  return std::all_of(qs.begin(), qs.end(), [&](Quantity q) { return s.count(q) != 0; });
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double default_tolerance(Quantity q) { return q == Quantity::kt ? 0.02 : 0.2; }

void GenerationRequest::validate() const {
  site.validate();
  if (n_days < 1) throw PreconditionError("generation needs at least one day");
  if (hour_of_day(start) != 0) throw PreconditionError("generation must start at 00:00");
  for (const auto& t : targets) {
    if (t.quantity != Quantity::kt && t.quantity != Quantity::wind)
      throw PreconditionError("targets are supported for kt and wind only, not " + std::string(to_string(t.quantity)));
    const auto [lo, hi] = quantity_range(t.quantity);
    if (!(t.value >= lo && t.value <= hi))
      throw PreconditionError("target " + std::string(to_string(t.quantity)) + " outside its physical range");
    if (!(t.tolerance > 0.0)) throw PreconditionError("target tolerance must be positive");
  }
}

std::optional<Quantity> quantity_of(Variable v) {
  switch (v) {
    case Variable::temp: return Quantity::temp;
    case Variable::rh: return Quantity::rh;
    case Variable::wind: return Quantity::wind;
    case Variable::ghi: return Quantity::ghi;
    case Variable::dhi: return Quantity::dhi;
    case Variable::bni: return Quantity::bni;
    case Variable::sunfrac: return Quantity::sunfrac;
    case Variable::okta: return Quantity::okta;
    case Variable::wind_dir: return std::nullopt;
  }
  return std::nullopt;
}

const PlanStep* GenerationPlan::step_for(Quantity q) const {
  for (const auto& s : steps)
    if (std::find(s.outputs.begin(), s.outputs.end(), q) != s.outputs.end()) return &s;
  return nullptr;
}

GenerationPlan resolve_plan(const ModelRegistry& registry, const GenerationRequest& request, const Chooser& chooser) {
  const auto all = producers(registry);
  std::vector<const Producer*> chosen;
  std::set<Quantity> available;

  for (std::size_t r = 0; r < 2; ++r) {  // roots first
    chosen.push_back(&all[r]);
    available.insert(all[r].outputs.front());
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (int qi = 0; qi <= static_cast<int>(Quantity::rh); ++qi) {
      const auto q = static_cast<Quantity>(qi);
      if (available.count(q)) continue;
      std::vector<const Producer*> cands;
      for (const auto& p : all)
        if (std::find(p.outputs.begin(), p.outputs.end(), q) != p.outputs.end() && contains(available, p.inputs))
          cands.push_back(&p);
      if (cands.empty()) continue;
      const Producer* pick = nullptr;
      if (const auto ov = request.overrides.find(q); ov != request.overrides.end()) {
        for (const auto* c : cands)
          if (c->name == ov->second) pick = c;
        if (!pick) continue;  // wait for the override's inputs
      } else if (cands.size() > 1 && chooser) {
        std::vector<Candidate> options;
        for (const auto* c : cands) options.push_back({c->name, c->rank_error});
        const auto k = chooser(q, options);
        if (k >= cands.size()) throw PreconditionError("model choice out of range");
        pick = cands[k];
      } else {
        pick = *std::min_element(cands.begin(), cands.end(), [](const Producer* a, const Producer* b) {
          const int ka = a->kind == StepKind::builtin ? 0 : 1, kb = b->kind == StepKind::builtin ? 0 : 1;
          return std::tie(ka, a->rank_error, a->name) < std::tie(kb, b->rank_error, b->name);
        });
      }
      chosen.push_back(pick);
      for (Quantity o : pick->outputs) available.insert(o);
      changed = true;
    }
  }

  std::vector<Variable> requested = request.variables;
  if (requested.empty())
    for (Variable v : kAllVariables)
      if (const auto q = quantity_of(v); q && available.count(*q)) requested.push_back(v);

  GenerationPlan plan;
  std::set<Quantity> needed;
  for (Variable v : requested) {
    const auto q = quantity_of(v);
    if (!q) {
      plan.unreachable.push_back({v, {"wind direction is not modelled"}});
      continue;
    }
    if (available.count(*q)) {
      needed.insert(*q);
      continue;
    }
    Unreachable u{v, {}};
    for (const auto& p : all) {
      if (std::find(p.outputs.begin(), p.outputs.end(), *q) == p.outputs.end()) continue;
      if (const auto ov = request.overrides.find(*q); ov != request.overrides.end() && ov->second != p.name) continue;
      for (Quantity in : p.inputs)
        if (!available.count(in)) u.missing.push_back(p.name + " needs " + std::string(to_string(in)));
    }
    if (u.missing.empty()) u.missing.push_back("no model produces " + std::string(to_string(*q)));
    plan.unreachable.push_back(std::move(u));
  }
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    const auto* p = *it;
    if (std::none_of(p->outputs.begin(), p->outputs.end(), [&](Quantity o) { return needed.count(o) != 0; })) continue;
    for (Quantity in : p->inputs) needed.insert(in);
  }
  for (const auto* p : chosen)
    if (std::any_of(p->outputs.begin(), p->outputs.end(), [&](Quantity o) { return needed.count(o) != 0; }))
      plan.steps.push_back({p->kind, p->name, p->inputs, p->outputs, p->entries});
  return plan;
}

bool plan_is_sound(const GenerationPlan& plan) {
  std::set<Quantity> produced;
  for (const auto& s : plan.steps) {
    if (!contains(produced, s.inputs)) return false;
    for (Quantity o : s.outputs) {
      if (produced.count(o)) return false;
      produced.insert(o);
    }
  }
  return true;
}

std::uint64_t substream_seed(std::uint64_t seed, std::string_view stream) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ h);
}

ConditionResult condition_to_target(const ARModel& model, std::size_t n, double target, double tolerance,
                                    std::uint64_t seed, std::size_t start_phase, std::pair<double, double> bounds) {
  if (n == 0) throw PreconditionError("conditioning needs at least one value");
  auto [lo, hi] = marginal_support(model.marginal);
  lo = std::max(lo, bounds.first);
  hi = std::min(hi, bounds.second);
  if (!(target > lo && target < hi))
    throw PreconditionError("target " + std::to_string(target) + " outside the model support (" + std::to_string(lo) +
                            ", " + std::to_string(hi) + ")");
  if (!(tolerance > 0.0)) throw PreconditionError("tolerance must be positive");

  const auto y = simulate_standard(model, n, seed);
  ConditionResult res;
  auto evaluate = [&](double shift, std::vector<double>& out, std::size_t& clamped) {
    out.resize(n);
    clamped = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = model.from_standard(y[i], start_phase + i, shift);
      out[i] = std::clamp(v, bounds.first, bounds.second);
      clamped += out[i] != v ? 1 : 0;
      sum += out[i];
    }
    return sum / static_cast<double>(n) - target;
  };

  std::vector<double> values;
  std::size_t clamped = 0;
  double best_err = std::numeric_limits<double>::infinity();
  auto record = [&](double shift, double f, int it) {
    if (std::abs(f) < best_err) {
      best_err = std::abs(f);
      res.values = values;
      res.shift = shift;
      res.achieved = target + f;
      res.clamped = clamped;
    }
    res.iterations = it;
    return std::abs(f) <= tolerance;
  };

  double s0 = 0.0, f0 = evaluate(s0, values, clamped);
  if (record(s0, f0, 1)) return res;
  double s1 = f0 > 0.0 ? -0.5 : 0.5;
  double f1 = evaluate(s1, values, clamped);
  if (record(s1, f1, 2)) return res;

  std::optional<std::pair<double, double>> neg, pos;  // (shift, f) with f < 0, f > 0
  auto note = [&](double s, double f) {
    if (f < 0.0 && (!neg || s > neg->first)) neg = {{s, f}};
    if (f > 0.0 && (!pos || s < pos->first)) pos = {{s, f}};
  };
  note(s0, f0);
  note(s1, f1);
  int side = 0;  // Illinois bookkeeping
  for (int it = 3; it <= kMaxIterations; ++it) {
    double next;
    if (neg && pos) {
      auto [a, fa] = *neg;
      auto [b, fb] = *pos;
      if (side == -1) fb *= 0.5;
      if (side == 1) fa *= 0.5;
      next = a - fa * (b - a) / (fb - fa);
    } else {
      const double slope = (f1 - f0) / (s1 - s0);
      const double dir = f1 < 0.0 ? 1.0 : -1.0;
      next = slope > 1e-12 ? s1 - f1 / slope : s1 + 2.0 * dir;
      next = std::clamp(next, s1 - 2.0, s1 + 2.0);
    }
    next = std::clamp(next, -12.0, 12.0);
    const double f = evaluate(next, values, clamped);
    if (record(next, f, it)) return res;
    const bool had_bracket = neg && pos;
    if (had_bracket) side = f < 0.0 ? -1 : 1;
    note(next, f);
    s0 = s1;
    f0 = f1;
    s1 = next;
    f1 = f;
    if (s1 == s0 && !had_bracket) break;
  }
  throw TargetNotReached("target " + std::to_string(target) + " not reached within " +
                             std::to_string(kMaxIterations) + " iterations; best " + std::to_string(res.achieved),
                         res.achieved);
}

namespace {

struct Context {
  const GenerationRequest& request;
  const ModelRegistry& registry;
  std::vector<SolarGeometry> geometry;
  std::map<Quantity, std::vector<double>> values;
  std::map<Variable, std::size_t> clamps;
  std::vector<TargetOutcome> outcomes;
  std::size_t days() const { return request.n_days; }
  std::size_t hours() const { return 24 * request.n_days; }
};

const Target* find_target(const GenerationRequest& r, Quantity q) {
  for (const auto& t : r.targets)
    if (t.quantity == q) return &t;
  return nullptr;
}

/// AR model for a root: the library AR entry if present, else white noise under the law.
ARModel root_model(const Context& ctx, const PlanStep& step, ModelKind law_kind, const char* what) {
  const ARModel* ar = nullptr;
  const LibraryEntry* law = nullptr;
  for (std::size_t i : step.entries) {
    const auto& e = ctx.registry.entries[i];
    if (e.kind() == ModelKind::ar && !ar) ar = &std::get<ARModel>(e.model);
    if (e.kind() == law_kind && !law) law = &e;
  }
  if (ar) return *ar;
  if (!law) throw DataError(std::string("no ") + what + " model in the library");
  ARModel m;
  m.variable = law_kind == ModelKind::clearness ? "kt" : "wind";
  m.order = 0;
  m.sigma = 1.0;
  if (law_kind == ModelKind::clearness)
    m.marginal = std::get<ClearnessLaw>(law->model);
  else
    m.marginal = std::get<WeibullFit>(law->model).law;
  return m;
}

std::vector<double> run_root(Context& ctx, const ARModel& model, Quantity q, std::size_t n, std::size_t phase,
                             std::pair<double, double> bounds, Variable clamp_var) {
  const auto seed = substream_seed(ctx.request.seed, to_string(q));
  if (const Target* t = find_target(ctx.request, q)) {
    auto r = condition_to_target(model, n, t->value, t->tolerance, seed, phase, bounds);
    ctx.outcomes.push_back({*t, r.achieved, r.iterations, r.shift});
    ctx.clamps[clamp_var] += r.clamped;
    return std::move(r.values);
  }
  auto v = simulate_ar(model, n, seed, 0.0, phase);
  for (double& x : v) {
    const double c = std::clamp(x, bounds.first, bounds.second);
    ctx.clamps[clamp_var] += c != x ? 1 : 0;
    x = c;
  }
  return v;
}

void hourly_ghi(Context& ctx) {
  const auto& kt = ctx.values.at(Quantity::kt);
  ARModel noise;
  noise.order = 1;
  noise.phi = {kGhiPhi};
  noise.sigma = kGhiSd * std::sqrt(1.0 - kGhiPhi * kGhiPhi);
  const auto eps = simulate_standard(noise, ctx.hours(), substream_seed(ctx.request.seed, "ghi"));
  std::vector<double> ghi(ctx.hours(), 0.0);
  for (std::size_t d = 0; d < ctx.days(); ++d) {
    const auto& g = ctx.geometry[d];
    const auto profile = hourly_profile(kt[d], g);
    const auto clear = hourly_profile(kEnvelopeKt, g);
    const double total = kt[d] * g.h0_daily;
    std::array<double, 24> env{}, v{};
    double sum = 0.0;
    for (std::size_t h = 0; h < 24; ++h) {
      env[h] = std::min(1500.0, std::max(clear[h], profile[h]));
      const double raw = profile[h] * std::max(0.0, 1.0 + eps[24 * d + h]);
      v[h] = std::clamp(raw, 0.0, env[h]);
      ctx.clamps[Variable::ghi] += v[h] != raw ? 1 : 0;
      sum += v[h];
    }
    // restore the daily total without leaving [0, envelope]
    if (sum > total && sum > 0.0) {
      for (double& x : v) x *= total / sum;
    } else if (sum < total) {
      double room = 0.0;
      for (std::size_t h = 0; h < 24; ++h) room += env[h] - v[h];
      const double deficit = total - sum;
      if (room > 0.0)
        for (std::size_t h = 0; h < 24; ++h) v[h] += std::min(1.0, deficit / room) * (env[h] - v[h]);
    }
    for (std::size_t h = 0; h < 24; ++h) ghi[24 * d + h] = g.h0_hourly[h] > 0.0 ? v[h] : 0.0;
  }
  ctx.values[Quantity::ghi] = std::move(ghi);
}

void apply_correlation(Context& ctx, const CorrelationModel& model) {
  const bool daily = is_daily(model.output);
  const std::size_t n = daily ? ctx.days() : ctx.hours();
  std::vector<double> out(n);
  std::vector<double> in(model.inputs.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < model.inputs.size(); ++k) {
      const Quantity q = model.inputs[k];
      const auto& src = ctx.values.at(q);
      in[k] = is_daily(q) && !daily ? src[i / 24] : src[i];
    }
    out[i] = evaluate_correlation(model, in).value;
  }
  ctx.values[model.output] = std::move(out);
}

void run_mlp(Context& ctx, const MlpModel& model) {
  const auto& ghi = ctx.values.at(Quantity::ghi);
  const auto& wind = ctx.values.at(Quantity::wind);
  std::vector<double> t(ctx.hours()), rh(ctx.hours());
  double prev_t = model.regressor.out.mean[0];
  double prev_rh = std::clamp(model.regressor.out.mean[1], 0.0, 100.0);
  for (std::size_t i = 0; i < ctx.hours(); ++i) {
    const auto p = mlp_predictors(static_cast<int>(i % 24), ghi[i], wind[i], prev_t, prev_rh);
    const auto raw = model.regressor.predict(p);
    t[i] = std::clamp(raw[0], -40.0, 60.0);
    rh[i] = std::clamp(raw[1], 0.0, 100.0);
    ctx.clamps[Variable::temp] += t[i] != raw[0] ? 1 : 0;
    ctx.clamps[Variable::rh] += rh[i] != raw[1] ? 1 : 0;
    prev_t = t[i];
    prev_rh = rh[i];
  }
  ctx.values[Quantity::temp] = std::move(t);
  ctx.values[Quantity::rh] = std::move(rh);
}

void run_ar(Context& ctx, const ARModel& model, Quantity q) {
  const Variable var = q == Quantity::temp ? Variable::temp : Variable::rh;
  const auto [lo, hi] = quantity_range(q);
  auto v = simulate_ar(model, ctx.hours(), substream_seed(ctx.request.seed, to_string(q)));
  for (double& x : v) {
    const double c = std::clamp(x, lo, hi);
    ctx.clamps[var] += c != x ? 1 : 0;
    x = c;
  }
  ctx.values[q] = std::move(v);
}

void run_step(Context& ctx, const PlanStep& step) {
  if (step.kind == StepKind::root) {
    if (step.outputs[0] == Quantity::kt) {
      const auto m = root_model(ctx, step, ModelKind::clearness, "clearness");
      ctx.values[Quantity::kt] = run_root(ctx, m, Quantity::kt, ctx.days(), 0, {0.0, 1.0}, Variable::ghi);
    } else {
      const auto m = root_model(ctx, step, ModelKind::weibull, "wind");
      ctx.values[Quantity::wind] = run_root(ctx, m, Quantity::wind, ctx.hours(), 0, {0.0, 75.0}, Variable::wind);
    }
    return;
  }
  if (step.kind == StepKind::model) {
    const auto& e = ctx.registry.entries[step.entries.front()];
    if (const auto* c = std::get_if<CorrelationModel>(&e.model))
      apply_correlation(ctx, *c);
    else if (const auto* m = std::get_if<MlpModel>(&e.model))
      run_mlp(ctx, *m);
    else
      run_ar(ctx, std::get<ARModel>(e.model), step.outputs[0]);
    return;
  }
  const std::string& name = step.producer;
  const std::size_t n = ctx.hours();
  if (name == "hourly_profile") {
    hourly_ghi(ctx);
  } else if (name == "hourly_kt") {
    const auto& ghi = ctx.values.at(Quantity::ghi);
    std::vector<double> k(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double h0 = ctx.geometry[i / 24].h0_hourly[i % 24];
      k[i] = h0 > 0.0 ? std::clamp(ghi[i] / h0, 0.0, 1.0) : 0.0;
    }
    ctx.values[Quantity::kt_hourly] = std::move(k);
  } else if (name == "diffuse_split" || name == "diffuse_split_hourly") {
    const bool hourly = name == "diffuse_split_hourly";
    const auto& kd = ctx.values.at(hourly ? Quantity::kd_hourly : Quantity::kd);
    const auto& ghi = ctx.values.at(Quantity::ghi);
    std::vector<double> dhi(n);
    for (std::size_t i = 0; i < n; ++i) dhi[i] = std::clamp(kd[hourly ? i : i / 24], 0.0, 1.0) * ghi[i];
    ctx.values[Quantity::dhi] = std::move(dhi);
  } else if (name == "beam") {
    const auto& ghi = ctx.values.at(Quantity::ghi);
    const auto& dhi = ctx.values.at(Quantity::dhi);
    std::vector<double> bni(n);
    for (std::size_t i = 0; i < n; ++i)
      bni[i] = beam_normal(ghi[i], dhi[i], mean_cos_zenith(ctx.geometry[i / 24], static_cast<int>(i % 24)));
    ctx.values[Quantity::bni] = std::move(bni);
  } else {
    throw Error("unknown builtin step " + name);
  }
}

/// Daylight share of each clock hour.
std::array<double, 24> daylight_fraction(const SolarGeometry& g) {
  std::array<double, 24> f{};
  const double half = g.day_length / 2.0;
  const double noon = 12.0 - g.solar_time_offset;
  const double rise = noon - half, set = noon + half;
  for (int h = 0; h < 24; ++h) f[static_cast<std::size_t>(h)] = std::max(0.0, std::min<double>(h + 1, set) - std::max<double>(h, rise));
  return f;
}

std::vector<double> emit(Context& ctx, Variable v) {
  const Quantity q = *quantity_of(v);
  const auto& src = ctx.values.at(q);
  const std::size_t n = ctx.hours();
  std::vector<double> out(n);
  if (v == Variable::sunfrac) {
    for (std::size_t d = 0; d < ctx.days(); ++d) {
      const auto frac = daylight_fraction(ctx.geometry[d]);
      for (std::size_t h = 0; h < 24; ++h) out[24 * d + h] = std::clamp(src[d], 0.0, 1.0) * frac[h];
    }
  } else if (is_daily(q)) {
    for (std::size_t i = 0; i < n; ++i) out[i] = src[i / 24];
  } else {
    out.assign(src.begin(), src.end());
  }
  const auto& vi = info(v);
  for (double& x : out) {
    const double c = std::clamp(x, vi.lo, vi.hi);
    ctx.clamps[v] += c != x ? 1 : 0;
    x = c;
  }
  return out;
}

}  // namespace

GeneratedSequence generate(const GenerationRequest& request, const ModelRegistry& registry, const Chooser& chooser) {
  request.validate();
  GeneratedSequence out;
  out.seed = request.seed;
  out.plan = resolve_plan(registry, request, chooser);

  Context ctx{request, registry, {}, {}, {}, {}};
  for (std::size_t d = 0; d < request.n_days; ++d)
    ctx.geometry.push_back(solar_geometry(request.site, day_of_year(request.start + static_cast<HourStamp>(24 * d))));
  for (const auto& t : request.targets)
    if (!out.plan.step_for(t.quantity))
      throw PreconditionError("target on " + std::string(to_string(t.quantity)) + ", which the plan does not produce");
  for (const auto& step : out.plan.steps) run_step(ctx, step);

  out.series = WeatherSeries(request.site, request.start, ctx.hours());
  std::vector<Variable> vars = request.variables;
  if (vars.empty())
    for (Variable v : kAllVariables)
      if (const auto q = quantity_of(v); q && ctx.values.count(*q)) vars.push_back(v);
  for (Variable v : vars) {
    const auto q = quantity_of(v);
    if (q && ctx.values.count(*q)) out.series.set_column(v, emit(ctx, v));
  }
  out.series.validate();

  if (ctx.values.count(Quantity::kt)) out.daily_kt = ctx.values.at(Quantity::kt);
  // report targets on the emitted data
  for (auto& o : ctx.outcomes) {
    if (o.target.quantity == Quantity::kt && ctx.values.count(Quantity::ghi)) {
      const auto& ghi = ctx.values.at(Quantity::ghi);
      double sum = 0.0;
      std::size_t days = 0;
      for (std::size_t d = 0; d < request.n_days; ++d) {
        if (ctx.geometry[d].h0_daily <= 0.0) continue;
        double total = 0.0;
        for (std::size_t h = 0; h < 24; ++h) total += ghi[24 * d + h];
        sum += total / ctx.geometry[d].h0_daily;
        ++days;
      }
      if (days) o.achieved = sum / static_cast<double>(days);
    }
  }
  out.targets = std::move(ctx.outcomes);
  out.clamp_counts = std::move(ctx.clamps);
  return out;
}

void to_json(nlohmann::json& j, const GenerationPlan& p) {
  j = nlohmann::json::object();
  j["steps"] = nlohmann::json::array();
  for (const auto& s : p.steps) {
    nlohmann::json e{{"kind", s.kind == StepKind::root ? "root" : s.kind == StepKind::builtin ? "builtin" : "model"},
                     {"producer", s.producer}};
    for (Quantity q : s.inputs) e["inputs"].push_back(std::string(to_string(q)));
    for (Quantity q : s.outputs) e["outputs"].push_back(std::string(to_string(q)));
    if (!e.contains("inputs")) e["inputs"] = nlohmann::json::array();
    j["steps"].push_back(std::move(e));
  }
  j["unreachable"] = nlohmann::json::array();
  for (const auto& u : p.unreachable)
    j["unreachable"].push_back({{"variable", std::string(info(u.variable).name)}, {"missing", u.missing}});
}

void to_json(nlohmann::json& j, const GeneratedSequence& g) {
  j = {{"seed", g.seed}, {"plan", g.plan}, {"hours", g.series.size()}};
  j["targets"] = nlohmann::json::array();
  for (const auto& t : g.targets)
    j["targets"].push_back({{"quantity", std::string(to_string(t.target.quantity))},
                            {"value", t.target.value},
                            {"tolerance", t.target.tolerance},
                            {"achieved", t.achieved},
                            {"iterations", t.iterations},
                            {"shift", t.shift}});
  j["clamp_counts"] = nlohmann::json::object();
  for (const auto& [v, c] : g.clamp_counts) j["clamp_counts"][std::string(info(v).name)] = c;
}

}  // namespace synthmet
