#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "synthmet/mlp.hpp"
#include "synthmet/weather.hpp"

namespace synthmet {

/// One row of 24 hourly values per complete day.
struct DayProfileMatrix {
  Variable variable{};
  RowMatrix values;
  std::vector<HourStamp> days;
};

DayProfileMatrix day_profiles(const WeatherSeries& series, Variable var, std::span<const DayBlock> days);
DayProfileMatrix day_profiles(const WeatherSeries& series, Variable var);

struct EigenPairs {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // columns, largest-magnitude entry positive
};

/// Eigendecomposition of a symmetric matrix with ordering and sign fixed.
EigenPairs principal_axes(const Eigen::MatrixXd& symmetric);

struct PcaResult {
  Eigen::MatrixXd directions;  // columns x components; rows of constant columns are zero
  std::vector<double> explained;  // variance fractions, non-increasing
  RowMatrix scores;               // rows x components, all components
  std::size_t retained = 0;
  std::vector<double> mean;
  std::vector<double> sd;  // 0 for dropped constant columns

  RowMatrix retained_scores() const { return scores.leftCols(static_cast<Eigen::Index>(retained)); }
  /// Standardised matrix rebuilt from the first `components` directions.
  RowMatrix reconstruct_standardized(std::size_t components) const;
};

/// PCA on the correlation matrix; constant columns are left out.
PcaResult pca(const RowMatrix& data, double variance_threshold = 0.90);

struct Merge {
  std::size_t a = 0;  // surviving cluster index (the smaller one)
  std::size_t b = 0;
  double height = 0.0;
  std::size_t size = 0;
};

/// Ward agglomeration (Lance-Williams update), n - 1 merges in order.
std::vector<Merge> ward_linkage(const RowMatrix& points, bool parallel = true);
/// Cluster label per point after stopping with k clusters; labels ordered by first member.
std::vector<std::size_t> cut_tree(const std::vector<Merge>& merges, std::size_t n, std::size_t k);
/// Largest relative gap between consecutive merge heights, k in [2, min(8, n)].
std::size_t automatic_class_count(const std::vector<Merge>& merges, std::size_t n);

struct DayClass {
  std::vector<std::size_t> members;  // row indices
  std::vector<double> centroid;
  double frequency = 0.0;
  std::size_t representative = 0;  // member nearest the centroid
};

/// k = nullopt picks the count automatically.
std::vector<DayClass> ascending_classification(const RowMatrix& scores, std::optional<std::size_t> k,
                                               bool parallel = true);

struct ClassReport {
  std::vector<Variable> variables;
  std::vector<HourStamp> days;               // day of each row
  std::vector<std::size_t> retained;          // PCA components kept per variable
  std::vector<DayClass> classes;
  std::map<Variable, RowMatrix> profiles;     // day profiles used
  RowMatrix scores;                           // factor scores that were classified
};

struct RepresentativeDays {
  std::vector<ClassReport> per_variable;
  ClassReport joint;
};

RepresentativeDays representative_days(const WeatherSeries& series, std::span<const Variable> vars,
                                       std::optional<std::size_t> k, double variance_threshold = 0.90);

void to_json(nlohmann::json& j, const ClassReport& r);
void to_json(nlohmann::json& j, const RepresentativeDays& r);
/// class,scope,variable,date,frequency,h00..h23
std::string representative_csv(const RepresentativeDays& r);

// ---------------------------------------------------------------- sequences

struct Predicate {
  Variable variable{};
  IndicatorKind kind{};
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

struct SequenceCriteria {
  std::size_t length = 1;
  std::vector<Predicate> predicates;
  std::vector<Variable> classify_variables;  // used when there is no predicate
  bool suppress_overlaps = false;
};

/// "tmean:30:32,wmean:0:3" with letters t h w g d b s n and kinds mean max min amp total.
std::vector<Predicate> parse_criteria(std::string_view text);
std::string format_predicate(const Predicate& p);

struct SequenceMatch {
  HourStamp start = 0;
  std::size_t length = 0;
  std::vector<double> achieved;  // per predicate: window mean of the daily indicator
  double distance = 0.0;
  std::optional<std::size_t> class_id;
  double frequency = 0.0;
};

std::vector<SequenceMatch> search_sequences(const WeatherSeries& series, const SequenceCriteria& criteria);
std::string sequences_csv(const SequenceCriteria& criteria, const std::vector<SequenceMatch>& matches);

}  // namespace synthmet
