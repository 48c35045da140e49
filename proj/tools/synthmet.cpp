// synthmet: command-line front end for the weather analysis, generation and
// building simulation library.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "synthmet/building.hpp"
#include "synthmet/classify.hpp"
#include "synthmet/correlation.hpp"
#include "synthmet/descstats.hpp"
#include "synthmet/error.hpp"
#include "synthmet/generate.hpp"
#include "synthmet/laws.hpp"
#include "synthmet/library.hpp"
#include "synthmet/psychro.hpp"
#include "synthmet/solar.hpp"

#ifndef SYNTHMET_VERSION
#define SYNTHMET_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace synthmet;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::atoll(fixed));
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

/// One manifest per run, written next to the primary output.
class Manifest {
 public:
  Manifest(std::string subcommand, const std::vector<std::string>& args) : subcommand_(std::move(subcommand)), args_(args) {}

  void input(const fs::path& p) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& f : fs::directory_iterator(p))
        if (f.is_regular_file()) files.push_back(f.path());
      std::sort(files.begin(), files.end());
      for (const auto& f : files) inputs_.push_back({{"path", f.string()}, {"sha256", sha256_file(f)}});
      return;
    }
    inputs_.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  }
  void output(const fs::path& p) { outputs_.push_back(p.string()); }
  void seed(std::uint64_t s) { seed_ = s; }
  json& extra() { return extra_; }

  void write(const fs::path& path) const {
    json j{{"subcommand", subcommand_}, {"arguments", args_}, {"seed", seed_ ? json(*seed_) : json(nullptr)},
           {"inputs", inputs_},         {"outputs", outputs_}, {"timestamp", utc_timestamp()},
           {"version", SYNTHMET_VERSION}};
    if (!extra_.is_null()) j["run"] = extra_;
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw Error("cannot write manifest " + path.string());
  }

 private:
  std::string subcommand_;
  std::vector<std::string> args_;
  std::optional<std::uint64_t> seed_;
  json inputs_ = json::array();
  std::vector<std::string> outputs_;
  json extra_;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

Variable parse_variable(const std::string& name) {
  const auto v = variable_from_name(name);
  if (!v) throw UsageError("unknown variable '" + name + "'");
  return *v;
}

std::vector<Variable> parse_variables(const std::string& list) {
  std::vector<Variable> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(parse_variable(item));
  if (out.empty()) throw UsageError("empty variable list");
  return out;
}

IndicatorKind parse_indicator(const std::string& name) {
  const auto k = indicator_from_name(name);
  if (!k) throw UsageError("unknown indicator '" + name + "' (mean | max | min | amplitude | daily-total)");
  return *k;
}

std::string period_name(const std::string& months) {
  if (months.empty()) return "all";
  std::string p = "m";
  for (char c : months) p += c == ',' ? '-' : c;
  return p;
}

WeatherSeries read_period(const fs::path& path, const std::string& months) {
  auto s = parse_weather_csv(path);
  if (months.empty()) return s;
  std::set<int> m;
  try {
    m = parse_months(months);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  return slice_period(s, m);
}

std::vector<double> present(std::span<const double> v) {
  std::vector<double> out;
  for (double x : v)
    if (!is_missing(x)) out.push_back(x);
  return out;
}

std::vector<std::string> g_args;

// ---------------------------------------------------------------- describe

struct DescribeArgs {
  std::string weather, var = "ghi", indicator = "mean", months, against, out = ".";
  std::size_t bins = 10;
};

void run_describe(const DescribeArgs& a) {
  const auto v = parse_variable(a.var);
  const auto kind = parse_indicator(a.indicator);
  const auto series = read_period(a.weather, a.months);
  const auto ind = daily_indicators(series, v, kind);
  const auto summary = summarize(ind, period_name(a.months));
  const auto hist = histogram(ind.values, a.bins);
  std::string report = format_report(summary);
  json j{{"summary", summary}, {"histogram", hist}};
  if (!a.against.empty()) {
    const auto colon = a.against.find(':');
    if (colon == std::string::npos) throw UsageError("--against expects <var>:<indicator>");
    const auto other = daily_indicators(series, parse_variable(a.against.substr(0, colon)),
                                        parse_indicator(a.against.substr(colon + 1)));
    // align both indicators on their common days
    DailyIndicator x = ind, y = other;
    x.values.clear(), x.days.clear(), y.values.clear(), y.days.clear();
    for (std::size_t i = 0, k = 0; i < ind.days.size(); ++i) {
      while (k < other.days.size() && other.days[k] < ind.days[i]) ++k;
      if (k < other.days.size() && other.days[k] == ind.days[i]) {
        x.values.push_back(ind.values[i]), x.days.push_back(ind.days[i]);
        y.values.push_back(other.values[k]), y.days.push_back(ind.days[i]);
      }
    }
    const auto chi = chi2_independence(x, y);
    report += format_report(chi);
    j["independence"] = chi;
  }
  const fs::path dir = a.out;
  fs::create_directories(dir);
  Manifest m("describe", g_args);
  m.input(a.weather);
  write_text(dir / "report.txt", report);
  write_text(dir / "histogram.csv", histogram_csv(hist));
  write_text(dir / "summary.json", j.dump(2) + "\n");
  for (const char* f : {"report.txt", "histogram.csv", "summary.json"}) m.output(dir / f);
  m.write(dir / "describe.manifest.json");
  std::cout << report;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  std::string weather, model, var, months, out, id, climate = "tropical";
  int order = 3;
  bool empirical = false;
  bool published = false;
  int epochs = 60;
  std::size_t hidden = 8;
  std::uint64_t seed = 1;
};

fs::path library_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SYNTHMET_LIBDIR"); env && *env) return env;
  throw UsageError("no model library: pass --out/--library or set SYNTHMET_LIBDIR");
}

ARModel fit_ar_entry(const WeatherSeries& s, const std::string& var, const FitArgs& a) {
  const auto q = quantity_from_name(var);
  if (!q) throw UsageError("unknown --var '" + var + "'");
  ARFitOptions o;
  o.max_order = a.order;
  o.variable = var;
  o.empirical_score = a.empirical;
  if (*q == Quantity::kt) {
    const auto kt = daily_kt(s);
    if (!a.empirical) o.marginal = fit_clearness_law(present(kt.kt), climate_from_name(a.climate));
    return fit_ar(kt.kt, o);
  }
  if (is_daily(*q)) throw UsageError("AR models are fitted on kt or an hourly variable, not '" + var + "'");
  const auto v = variable_from_name(var);
  if (!v) throw UsageError("no weather column for '" + var + "'");
  o.period = 24;
  o.start_phase = static_cast<std::size_t>(hour_of_day(s.time(0)));
  const auto col = s.column(*v);
  if (*v == Variable::wind && !a.empirical) o.marginal = fit_weibull(present(col)).law;
  return fit_ar(col, o);
}

void run_fit(const FitArgs& a) {
  const auto dir = library_dir(a.out);
  const auto s = read_period(a.weather, a.months);
  LibraryEntry e;
  e.site = s.site().name;
  e.period = period_name(a.months);
  if (a.model == "weibull") {
    if (!s.has(Variable::wind)) throw DataError("weather has no wind column");
    e.model = fit_weibull(present(s.column(Variable::wind)));
  } else if (a.model == "clearness") {
    e.model = fit_clearness_law(present(daily_kt(s).kt), climate_from_name(a.climate));
  } else if (a.model == "ar") {
    if (a.var.empty()) throw UsageError("fit --model ar needs --var");
    e.model = fit_ar_entry(s, a.var, a);
  } else if (a.model == "mlp") {
    MlpConfig c;
    c.epochs = a.epochs;
    c.hidden = a.hidden;
    e.model = fit_mlp(s, c, a.seed);
  } else if (a.model.rfind("correlation:", 0) == 0) {
    const auto name = a.model.substr(12);
    const auto& reg = correlation_registry();
    if (std::none_of(reg.begin(), reg.end(), [&](const CorrelationSpec& c) { return c.name == name; }))
      throw UsageError("unknown correlation '" + name + "'");
    e.model = a.published ? default_correlation(name) : fit_correlation(name, s);
  } else {
    throw UsageError("unknown model '" + a.model + "' (weibull | clearness | ar | mlp | correlation:<name>)");
  }
  e.id = a.id.empty() ? default_entry_id(e) : a.id;
  Manifest m("fit", g_args);
  m.input(a.weather);
  if (a.model == "mlp") m.seed(a.seed);
  const auto path = save_entry(e, dir);
  m.output(path);
  m.write(dir / (e.id + ".manifest.json"));
  std::cout << path.string() << '\n';
}

// ---------------------------------------------------------------- classify

struct ClassifyArgs {
  std::string weather, vars = "ghi,temp", months, out = ".";
  int k = 0;
  double threshold = 0.90;
};

void run_classify(const ClassifyArgs& a) {
  const auto vars = parse_variables(a.vars);
  if (a.k < 0) throw UsageError("--k must be positive");
  const auto s = read_period(a.weather, a.months);
  std::optional<std::size_t> k;
  if (a.k > 0) k = static_cast<std::size_t>(a.k);
  const auto r = representative_days(s, vars, k, a.threshold);
  const fs::path dir = a.out;
  fs::create_directories(dir);
  Manifest m("classify", g_args);
  m.input(a.weather);
  write_text(dir / "classes.json", json(r).dump(2) + "\n");
  write_text(dir / "representative.csv", representative_csv(r));
  m.output(dir / "classes.json");
  m.output(dir / "representative.csv");
  m.write(dir / "classify.manifest.json");
  std::cout << r.joint.classes.size() << " classes over " << r.joint.days.size() << " days\n";
  for (std::size_t c = 0; c < r.joint.classes.size(); ++c) {
    const auto& cl = r.joint.classes[c];
    std::cout << "class " << c + 1 << "  frequency " << std::fixed << std::setprecision(3) << cl.frequency
              << "  representative " << format_date(r.joint.days[cl.representative]) << '\n';
  }
}

// ---------------------------------------------------------------- search

struct SearchArgs {
  std::string weather, criteria, vars = "ghi,temp", months, out = "sequences.csv";
  std::size_t len = 1;
  bool no_overlap = false;
};

void run_search(const SearchArgs& a) {
  SequenceCriteria c;
  c.length = a.len;
  c.suppress_overlaps = a.no_overlap;
  if (a.len < 1) throw UsageError("--len must be at least 1");
  try {
    if (!a.criteria.empty()) c.predicates = parse_criteria(a.criteria);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  c.classify_variables = parse_variables(a.vars);
  const auto s = read_period(a.weather, a.months);
  const auto found = search_sequences(s, c);
  Manifest m("search", g_args);
  m.input(a.weather);
  write_text(a.out, sequences_csv(c, found));
  m.output(a.out);
  m.write(a.out + ".manifest.json");
  std::cout << found.size() << " sequence(s)\n";
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string library, out = "generated.csv", site = "site", start = "2000-01-01", vars, months;
  std::vector<std::string> targets, overrides;
  std::size_t days = 365;
  std::uint64_t seed = 1;
  double lat = -20.9, lon = 55.5, alt = 0.0;
  bool interactive = false;
};

Target parse_target(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--target expects <quantity>=<value>[:<tolerance>]");
  const auto q = quantity_from_name(text.substr(0, eq));
  if (!q) throw UsageError("unknown target quantity '" + text.substr(0, eq) + "'");
  Target t;
  t.quantity = *q;
  t.tolerance = default_tolerance(*q);
  const auto rest = text.substr(eq + 1);
  const auto colon = rest.find(':');
  try {
    t.value = std::stod(rest.substr(0, colon));
    if (colon != std::string::npos) t.tolerance = std::stod(rest.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("malformed target '" + text + "'");
  }
  return t;
}

std::size_t prompt_choice(Quantity q, const std::vector<Candidate>& cands) {
  std::cerr << "Several models produce " << to_string(q) << ":\n";
  for (std::size_t i = 0; i < cands.size(); ++i)
    std::cerr << "  [" << i + 1 << "] " << cands[i].producer << "  rmse " << cands[i].rank_error << '\n';
  for (;;) {
    std::cerr << "choice [1-" << cands.size() << "]: ";
    std::string line;
    if (!std::getline(std::cin, line)) return 0;
    try {
      const auto c = std::stoul(line);
      if (c >= 1 && c <= cands.size()) return c - 1;
    } catch (const std::exception&) {
    }
  }
}

void run_generate(const GenerateArgs& a) {
  const auto dir = library_dir(a.library);
  auto reg = load_library(dir);
  if (!a.months.empty()) reg = reg.filter_period(period_name(a.months));
  for (const auto& w : reg.warnings) std::cerr << "warning: " << w << '\n';
  GenerationRequest r;
  r.site = {a.site, a.lat, a.lon, a.alt, std::nullopt};
  r.n_days = a.days;
  const auto start = parse_stamp(a.start.size() == 10 ? a.start + "T00:00" : a.start);
  if (!start) throw UsageError("malformed --start '" + a.start + "'");
  r.start = *start;
  if (!a.vars.empty()) r.variables = parse_variables(a.vars);
  for (const auto& t : a.targets) r.targets.push_back(parse_target(t));
  for (const auto& o : a.overrides) {
    const auto eq = o.find('=');
    const auto q = eq == std::string::npos ? std::nullopt : quantity_from_name(o.substr(0, eq));
    if (!q) throw UsageError("--use expects <quantity>=<entry id>");
    r.overrides[*q] = o.substr(eq + 1);
  }
  r.seed = a.seed;
  try {
    r.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  const auto g = generate(r, reg, a.interactive ? Chooser(prompt_choice) : Chooser());
  Manifest m("generate", g_args);
  m.input(dir);
  m.seed(a.seed);
  write_weather_csv(g.series, a.out);
  m.output(a.out);
  m.extra() = g;
  m.write(a.out + ".manifest.json");
  for (const auto& u : g.plan.unreachable) {
    std::cerr << "unreachable: " << info(u.variable).name << " (missing";
    for (const auto& s : u.missing) std::cerr << ' ' << s;
    std::cerr << ")\n";
  }
  for (const auto& t : g.targets)
    std::cout << "target " << to_string(t.target.quantity) << ' ' << t.target.value << " achieved " << t.achieved
              << " in " << t.iterations << " iteration(s)\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string building, weather, comfort, out = ".";
  int substeps = 4;
};

void run_simulate(const SimulateArgs& a) {
  const auto w = parse_weather_csv(a.weather);
  const double p = w.site().pressure_pa();
  const auto b = a.building.empty() ? build_demo_dwelling(p) : load_building(a.building, p);
  const auto zones = a.comfort.empty() ? default_comfort_zones() : load_comfort_zones(a.comfort);
  SimulationOptions opt;
  opt.substeps = a.substeps;
  const auto r = ideal_hvac_loads(b.model, w, b.loads, b.hvac, opt);

  std::ostringstream comfort;
  comfort << "zone_model,comfort_zone,fraction\n";
  json cj = json::array();
  for (std::size_t z = 0; z < b.model.zones.size(); ++z) {
    const auto f = comfort_fraction(r.zone_states[z], zones);
    for (std::size_t c = 0; c < zones.size(); ++c) {
      comfort << b.model.zones[z].name << ',' << zones[c].name << ',' << f[c] << '\n';
      cj.push_back({{"zone", b.model.zones[z].name}, {"comfort_zone", zones[c].name}, {"fraction", f[c]}});
    }
  }
  const fs::path dir = a.out;
  fs::create_directories(dir);
  Manifest m("simulate", g_args);
  m.input(a.weather);
  if (!a.building.empty()) m.input(a.building);
  if (!a.comfort.empty()) m.input(a.comfort);
  write_text(dir / "loads.csv", loads_csv(r));
  write_text(dir / "comfort.csv", comfort.str());
  m.output(dir / "loads.csv");
  m.output(dir / "comfort.csv");
  m.extra() = {{"mean_kWh_per_day", {{"sensible", r.mean.sensible}, {"latent", r.mean.latent}, {"total", r.mean.total}}},
               {"comfort", cj},
               {"energy_residual_J", r.thermal.residual},
               {"energy_gross_J", r.thermal.gross}};
  m.write(dir / "simulate.manifest.json");
  std::cout << std::fixed << std::setprecision(2) << "mean daily cooling: sensible " << r.mean.sensible
            << " kWh, latent " << r.mean.latent << " kWh, total " << r.mean.total << " kWh\n";
}

// ---------------------------------------------------------------- derive / extrapolate / init-building

void run_derive(const std::string& weather, const std::string& out) {
  const auto w = parse_weather_csv(weather);
  Manifest m("derive", g_args);
  m.input(weather);
  write_weather_csv(w, out, derived_columns(w));
  m.output(out);
  m.write(out + ".manifest.json");
}

struct ExtrapolateArgs {
  std::string weather, out = "extrapolated.csv", site;
  double lat = 0, lon = 0, alt = 0, lapse = 6.5;
  std::optional<double> pressure;
};

void run_extrapolate(const ExtrapolateArgs& a) {
  const auto w = parse_weather_csv(a.weather);
  Site target{a.site.empty() ? w.site().name : a.site, a.lat, a.lon, a.alt, a.pressure};
  try {
    target.validate();
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  const auto r = extrapolate_site(w, target, {a.lapse});
  Manifest m("extrapolate", g_args);
  m.input(a.weather);
  write_weather_csv(r, a.out);
  m.output(a.out);
  m.write(a.out + ".manifest.json");
}

void run_init_building(const std::string& out) {
  const fs::path dir = out;
  fs::create_directories(dir);
  Manifest m("init-building", g_args);
  write_text(dir / "demo_building.json", demo_building_json());
  write_text(dir / "comfort_zones.json", default_comfort_json());
  m.output(dir / "demo_building.json");
  m.output(dir / "comfort_zones.json");
  m.write(dir / "init-building.manifest.json");
}

}  // namespace

int main(int argc, char** argv) {
  g_args.assign(argv + 1, argv + argc);
  CLI::App app{"synthmet: hourly weather analysis, synthetic sequence generation and building load simulation"};
  app.set_version_flag("--version", SYNTHMET_VERSION);
  app.require_subcommand(1);

  DescribeArgs da;
  auto* describe = app.add_subcommand("describe", "daily indicator statistics and histogram");
  describe->add_option("weather", da.weather, "weather CSV")->required()->check(CLI::ExistingFile);
  describe->add_option("--var", da.var, "variable (temp rh wind winddir ghi dhi bni sunfrac okta)");
  describe->add_option("--indicator", da.indicator, "mean | max | min | amplitude | daily-total");
  describe->add_option("--months", da.months, "month list, e.g. 11,12,1,2,3,4");
  describe->add_option("--bins", da.bins, "histogram bins")->check(CLI::PositiveNumber);
  describe->add_option("--against", da.against, "chi-2 independence against <var>:<indicator>");
  describe->add_option("--out", da.out, "output directory");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit a model and store it in the library");
  fit->add_option("weather", fa.weather, "weather CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--model", fa.model, "weibull | clearness | ar | mlp | correlation:<name>")->required();
  fit->add_option("--var", fa.var, "AR variable (kt, wind, temp, rh, ...)");
  fit->add_option("--months", fa.months, "fit on these months only");
  fit->add_option("--out", fa.out, "library directory (default $SYNTHMET_LIBDIR)");
  fit->add_option("--id", fa.id, "entry id");
  fit->add_option("--climate", fa.climate, "tropical | temperate");
  fit->add_option("--order", fa.order, "maximum AR order")->check(CLI::Range(0, 3));
  fit->add_flag("--empirical", fa.empirical, "AR under the sample's normal-score map");
  fit->add_flag("--published", fa.published, "store the published correlation coefficients");
  fit->add_option("--epochs", fa.epochs, "MLP epochs")->check(CLI::PositiveNumber);
  fit->add_option("--hidden", fa.hidden, "MLP hidden units")->check(CLI::PositiveNumber);
  fit->add_option("--seed", fa.seed, "MLP initialisation seed");

  ClassifyArgs ca;
  auto* classify = app.add_subcommand("classify", "representative days by PCA and Ward classification");
  classify->add_option("weather", ca.weather, "weather CSV")->required()->check(CLI::ExistingFile);
  classify->add_option("--vars", ca.vars, "comma-separated variables");
  classify->add_option("--k", ca.k, "number of classes (default automatic)");
  classify->add_option("--months", ca.months, "month list");
  classify->add_option("--threshold", ca.threshold, "explained-variance threshold")->check(CLI::Range(0.01, 1.0));
  classify->add_option("--out", ca.out, "output directory");

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "find day sequences matching daily criteria");
  search->add_option("weather", sa.weather, "weather CSV")->required()->check(CLI::ExistingFile);
  search->add_option("--criteria", sa.criteria, "e.g. tmean:30:32,wmean:0:3");
  search->add_option("--len", sa.len, "sequence length in days");
  search->add_option("--vars", sa.vars, "variables classified when no criterion is given");
  search->add_option("--months", sa.months, "month list");
  search->add_flag("--no-overlap", sa.no_overlap, "drop windows overlapping a better match");
  search->add_option("--out", sa.out, "output CSV");

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "generate a synthetic hourly sequence from the model library");
  gen->add_option("--library", ga.library, "library directory (default $SYNTHMET_LIBDIR)");
  gen->add_option("--days", ga.days, "number of days")->check(CLI::PositiveNumber);
  gen->add_option("--target", ga.targets, "kt=0.75[:tol] or wind=3[:tol]; repeatable");
  gen->add_option("--use", ga.overrides, "<quantity>=<entry id>; repeatable");
  gen->add_option("--seed", ga.seed, "random seed");
  gen->add_option("--out", ga.out, "output weather CSV");
  gen->add_option("--vars", ga.vars, "variables to emit");
  gen->add_option("--months", ga.months, "use library entries fitted on this period");
  gen->add_option("--start", ga.start, "first day, YYYY-MM-DD");
  gen->add_option("--site", ga.site, "site name");
  gen->add_option("--lat", ga.lat, "latitude, degrees north");
  gen->add_option("--lon", ga.lon, "longitude, degrees east");
  gen->add_option("--alt", ga.alt, "altitude, m");
  gen->add_flag("--interactive", ga.interactive, "ask when several models produce one variable");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "ideal-HVAC cooling loads and comfort fractions");
  sim->add_option("--building", ma.building, "building JSON (default: demo dwelling)")->check(CLI::ExistingFile);
  sim->add_option("--weather", ma.weather, "weather CSV")->required()->check(CLI::ExistingFile);
  sim->add_option("--comfort", ma.comfort, "comfort zone JSON")->check(CLI::ExistingFile);
  sim->add_option("--substeps", ma.substeps, "implicit Euler steps per hour")->check(CLI::Range(1, 3600));
  sim->add_option("--out", ma.out, "output directory");

  std::string dw, dout = "derived.csv";
  auto* derive = app.add_subcommand("derive", "append psychrometric and sky temperature columns");
  derive->add_option("weather", dw, "weather CSV")->required()->check(CLI::ExistingFile);
  derive->add_option("--out", dout, "output CSV");

  ExtrapolateArgs ea;
  double pressure = 0.0;
  auto* extra = app.add_subcommand("extrapolate", "move a weather series to another site");
  extra->add_option("weather", ea.weather, "weather CSV")->required()->check(CLI::ExistingFile);
  extra->add_option("--lat", ea.lat, "target latitude")->required();
  extra->add_option("--lon", ea.lon, "target longitude")->required();
  extra->add_option("--alt", ea.alt, "target altitude, m")->required();
  auto* popt = extra->add_option("--pressure", pressure, "target pressure, Pa");
  extra->add_option("--site", ea.site, "target site name");
  extra->add_option("--lapse", ea.lapse, "lapse rate, K/km");
  extra->add_option("--out", ea.out, "output CSV");

  std::string iout = ".";
  auto* init = app.add_subcommand("init-building", "write the demo dwelling and default comfort zones");
  init->add_option("--out", iout, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*describe) run_describe(da);
    else if (*fit) run_fit(fa);
    else if (*classify) run_classify(ca);
    else if (*search) run_search(sa);
    else if (*gen) run_generate(ga);
    else if (*sim) run_simulate(ma);
    else if (*derive) run_derive(dw, dout);
    else if (*extra) {
      if (popt->count()) ea.pressure = pressure;
      run_extrapolate(ea);
    } else if (*init) run_init_building(iout);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const TargetNotReached& e) {
    std::cerr << "error: " << e.what() << " (best achieved " << e.best_achieved << ")\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
