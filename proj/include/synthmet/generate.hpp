#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "synthmet/library.hpp"
#include "synthmet/weather.hpp"

namespace synthmet {

/// Daily-mean target on a root quantity (daily kt or hourly wind speed).
struct Target {
  Quantity quantity = Quantity::kt;
  double value = 0.0;
  double tolerance = 0.0;
};

double default_tolerance(Quantity q);

struct GenerationRequest {
  Site site;
  std::size_t n_days = 1;
  HourStamp start = 0;  // 00:00 of the first day
  std::vector<Variable> variables;  // empty = everything the plan can produce
  std::vector<Target> targets;
  std::uint64_t seed = 1;
  std::map<Quantity, std::string> overrides;  // output -> library entry id

  void validate() const;
};

enum class StepKind { root, builtin, model };

struct PlanStep {
  StepKind kind = StepKind::builtin;
  std::string producer;  // builtin name or library entry id
  std::vector<Quantity> inputs;
  std::vector<Quantity> outputs;
  std::vector<std::size_t> entries;  // library entries the step uses
};

struct Unreachable {
  Variable variable{};
  std::vector<std::string> missing;
};

struct GenerationPlan {
  std::vector<PlanStep> steps;
  std::vector<Unreachable> unreachable;

  const PlanStep* step_for(Quantity q) const;
};

struct Candidate {
  std::string producer;
  double rank_error = 0.0;
};

/// Picks one of several producers of a quantity (interactive selection).
using Chooser = std::function<std::size_t(Quantity, const std::vector<Candidate>&)>;

std::optional<Quantity> quantity_of(Variable v);

GenerationPlan resolve_plan(const ModelRegistry& registry, const GenerationRequest& request,
                            const Chooser& chooser = {});

/// True when every step only consumes quantities produced by earlier steps.
bool plan_is_sound(const GenerationPlan& plan);

struct ConditionResult {
  std::vector<double> values;
  double shift = 0.0;
  int iterations = 0;
  double achieved = 0.0;
  std::size_t clamped = 0;
};

/// Shifts the AR path in normal-score space until the mean of the back-transformed
/// (and clamped) values is within tolerance of target.
ConditionResult condition_to_target(const ARModel& model, std::size_t n, double target, double tolerance,
                                    std::uint64_t seed, std::size_t start_phase = 0,
                                    std::pair<double, double> bounds = {-1e300, 1e300});

struct TargetOutcome {
  Target target;
  double achieved = 0.0;
  int iterations = 0;
  double shift = 0.0;
};

struct GeneratedSequence {
  WeatherSeries series;
  GenerationPlan plan;
  std::vector<TargetOutcome> targets;
  std::map<Variable, std::size_t> clamp_counts;
  std::uint64_t seed = 0;
  std::vector<double> daily_kt;
};

GeneratedSequence generate(const GenerationRequest& request, const ModelRegistry& registry,
                           const Chooser& chooser = {});

std::uint64_t substream_seed(std::uint64_t seed, std::string_view stream);

void to_json(nlohmann::json& j, const GenerationPlan& p);
/// Plan, seed, achieved targets and clamp counts (the series itself is not included).
void to_json(nlohmann::json& j, const GeneratedSequence& g);

}  // namespace synthmet
