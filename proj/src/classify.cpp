#include "synthmet/classify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"
#include "synthmet/kernels.hpp"

namespace synthmet {

DayProfileMatrix day_profiles(const WeatherSeries& series, Variable var, std::span<const DayBlock> days) {
  if (!series.has(var)) throw DataError("series has no column " + std::string(info(var).column));
  const auto col = series.column(var);
  DayProfileMatrix m;
  m.variable = var;
  m.values.resize(static_cast<Eigen::Index>(days.size()), 24);
  for (std::size_t d = 0; d < days.size(); ++d) {
    for (std::size_t h = 0; h < 24; ++h) {
      const double v = col[days[d].first + h];
      if (is_missing(v)) throw PreconditionError("day profile with a missing hour on " + format_date(days[d].day));
      m.values(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(h)) = v;
    }
    m.days.push_back(days[d].day);
  }
  return m;
}

DayProfileMatrix day_profiles(const WeatherSeries& series, Variable var) {
  const Variable vars[] = {var};
  return day_profiles(series, var, complete_days(series, vars));
}

EigenPairs principal_axes(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::Index n = symmetric.rows();
  EigenPairs out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = n - 1 - k;  // solver sorts ascending
    out.values(k) = solver.eigenvalues()(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) arg = i;
    if (v(arg) < 0.0) v = -v;
    out.vectors.col(k) = v;
  }
  return out;
}

RowMatrix PcaResult::reconstruct_standardized(std::size_t components) const {
  const auto c = static_cast<Eigen::Index>(components);
  return scores.leftCols(c) * directions.leftCols(c).transpose();
}

PcaResult pca(const RowMatrix& data, double variance_threshold) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (n < 2) throw PreconditionError("PCA needs at least 2 rows");
  if (!(variance_threshold > 0.0 && variance_threshold <= 1.0))
    throw PreconditionError("variance threshold must lie in (0, 1]");

  PcaResult r;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index c = 0; c < p; ++c) {
    const double mean = data.col(c).mean();
    const double var = (data.col(c).array() - mean).square().sum() / static_cast<double>(n - 1);
    const double sd = std::sqrt(var);
    r.mean.push_back(mean);
    if (sd > 1e-12 * std::max(1.0, std::abs(mean))) {
      r.sd.push_back(sd);
      kept.push_back(c);
    } else {
      r.sd.push_back(0.0);
    }
  }
  if (kept.empty()) throw DataError("PCA on a zero-variance matrix");

  const auto q = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd z(n, q);
  for (Eigen::Index k = 0; k < q; ++k) {
    const auto c = kept[static_cast<std::size_t>(k)];
    z.col(k) = (data.col(c).array() - r.mean[static_cast<std::size_t>(c)]) / r.sd[static_cast<std::size_t>(c)];
  }
  const Eigen::MatrixXd corr = z.transpose() * z / static_cast<double>(n - 1);
  const auto axes = principal_axes(corr);

  r.directions = Eigen::MatrixXd::Zero(p, q);
  for (Eigen::Index k = 0; k < q; ++k) r.directions.row(kept[static_cast<std::size_t>(k)]) = axes.vectors.row(k);
  r.scores = z * axes.vectors;

  double total = 0.0;
  for (Eigen::Index k = 0; k < q; ++k) total += std::max(0.0, axes.values(k));
  double cumulative = 0.0;
  r.retained = static_cast<std::size_t>(q);
  bool reached = false;
  for (Eigen::Index k = 0; k < q; ++k) {
    r.explained.push_back(std::max(0.0, axes.values(k)) / total);
    cumulative += r.explained.back();
    if (!reached && cumulative >= variance_threshold - 1e-12) {
      r.retained = static_cast<std::size_t>(k) + 1;
      reached = true;
    }
  }
  return r;
}

std::vector<Merge> ward_linkage(const RowMatrix& points, bool parallel) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<Merge> merges;
  if (n < 2) return merges;
  Eigen::MatrixXd cost = parallel ? parallel::pairwise_sq_distances(points) : serial::pairwise_sq_distances(points);
  cost *= 0.5;  // Ward cost of merging two singletons
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    const auto pair = parallel ? parallel::closest_active_pair(cost, active) : serial::closest_active_pair(cost, active);
    const std::size_t i = pair.i, j = pair.j;
    const double ni = static_cast<double>(size[i]), nj = static_cast<double>(size[j]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == i || k == j) continue;
      const double nk = static_cast<double>(size[k]);
      const auto ki = static_cast<Eigen::Index>(k), ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      const double updated = ((ni + nk) * cost(ki, ii) + (nj + nk) * cost(ki, jj) - nk * pair.cost) / (ni + nj + nk);
      cost(ki, ii) = cost(ii, ki) = updated;
    }
    active[j] = 0;
    size[i] += size[j];
    merges.push_back({i, j, std::sqrt(2.0 * std::max(0.0, pair.cost)), size[i]});
  }
  return merges;
}

std::vector<std::size_t> cut_tree(const std::vector<Merge>& merges, std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw PreconditionError("class count must lie in [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - k; ++m) parent[find(merges[m].b)] = find(merges[m].a);
  std::vector<std::size_t> labels(n);
  std::map<std::size_t, std::size_t> id;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    const auto it = id.try_emplace(root, id.size()).first;
    labels[i] = it->second;
  }
  return labels;
}

std::size_t automatic_class_count(const std::vector<Merge>& merges, std::size_t n) {
  if (n <= 2) return n;
  const std::size_t k_max = std::min<std::size_t>(8, n);
  std::size_t best = 2;
  double best_gap = -1.0;
  for (std::size_t k = 2; k <= k_max; ++k) {
    const double next = merges[n - k].height;
    const double prev = n - k >= 1 ? merges[n - k - 1].height : 0.0;
    const double gap = next > 0.0 ? (next - prev) / next : 0.0;
    if (gap > best_gap + 1e-12) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

std::vector<DayClass> ascending_classification(const RowMatrix& scores, std::optional<std::size_t> k, bool parallel) {
  const auto n = static_cast<std::size_t>(scores.rows());
  if (n == 0) throw PreconditionError("classification of an empty set");
  if (k && (*k < 1 || *k > n))
    throw PreconditionError("class count " + std::to_string(*k) + " exceeds day count " + std::to_string(n));
  std::vector<std::size_t> labels(n, 0);
  if (!k || *k > 1) {
    const auto merges = ward_linkage(scores, parallel);
    const std::size_t classes = k ? *k : automatic_class_count(merges, n);
    labels = cut_tree(merges, n, classes);
  }
  const std::size_t count = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<DayClass> out(count);
  for (std::size_t i = 0; i < n; ++i) out[labels[i]].members.push_back(i);
  const auto dims = static_cast<std::size_t>(scores.cols());
  for (auto& c : out) {
    c.frequency = static_cast<double>(c.members.size()) / static_cast<double>(n);
    c.centroid.assign(dims, 0.0);
    for (std::size_t i : c.members)
      for (std::size_t d = 0; d < dims; ++d) c.centroid[d] += scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
    for (double& v : c.centroid) v /= static_cast<double>(c.members.size());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i : c.members) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dims; ++d) {
        const double e = scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) - c.centroid[d];
        d2 += e * e;
      }
      if (d2 < best) {
        best = d2;
        c.representative = i;
      }
    }
  }
  return out;
}

namespace {

RowMatrix scale_block(const RowMatrix& block) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < block.cols(); ++c) {
    const double mean = block.col(c).mean();
    total += (block.col(c).array() - mean).square().sum() / static_cast<double>(std::max<Eigen::Index>(1, block.rows() - 1));
  }
  return total > 0.0 ? RowMatrix(block / std::sqrt(total)) : block;
}

}  // namespace

RepresentativeDays representative_days(const WeatherSeries& series, std::span<const Variable> vars,
                                       std::optional<std::size_t> k, double variance_threshold) {
  if (vars.empty()) throw PreconditionError("representative days need at least one variable");
  for (Variable v : vars)
    if (!series.has(v)) throw DataError("series has no column " + std::string(info(v).column));
  const auto days = complete_days(series, vars);
  const std::size_t needed = 2 * (k ? *k : 2);
  if (days.size() < needed)
    throw DataError("need at least " + std::to_string(needed) + " complete days, got " + std::to_string(days.size()));

  RepresentativeDays out;
  std::vector<RowMatrix> blocks;
  std::vector<HourStamp> stamps;
  for (const auto& d : days) stamps.push_back(d.day);
  for (Variable v : vars) {
    auto m = day_profiles(series, v, days);
    const auto p = pca(m.values, variance_threshold);
    ClassReport r;
    r.variables = {v};
    r.days = stamps;
    r.retained = {p.retained};
    r.scores = p.retained_scores();
    r.classes = ascending_classification(r.scores, k);
    blocks.push_back(scale_block(r.scores));
    out.joint.profiles[v] = m.values;
    r.profiles[v] = std::move(m.values);
    out.joint.retained.push_back(p.retained);
    out.per_variable.push_back(std::move(r));
  }
  Eigen::Index width = 0;
  for (const auto& b : blocks) width += b.cols();
  RowMatrix joint(static_cast<Eigen::Index>(days.size()), width);
  Eigen::Index col = 0;
  for (const auto& b : blocks) {
    joint.middleCols(col, b.cols()) = b;
    col += b.cols();
  }
  out.joint.variables.assign(vars.begin(), vars.end());
  out.joint.days = stamps;
  out.joint.classes = ascending_classification(joint, k);
  out.joint.scores = std::move(joint);
  return out;
}

void to_json(nlohmann::json& j, const ClassReport& r) {
  j = nlohmann::json::object();
  for (Variable v : r.variables) j["variables"].push_back(std::string(info(v).name));
  j["days"] = r.days.size();
  j["retained_components"] = r.retained;
  j["classes"] = nlohmann::json::array();
  for (std::size_t c = 0; c < r.classes.size(); ++c) {
    const auto& dc = r.classes[c];
    nlohmann::json e{{"id", c},
                     {"frequency", dc.frequency},
                     {"size", dc.members.size()},
                     {"representative_date", format_date(r.days[dc.representative])}};
    for (const auto& [v, m] : r.profiles) {
      const auto row = m.row(static_cast<Eigen::Index>(dc.representative));
      e["profiles"][std::string(info(v).name)] = std::vector<double>(row.data(), row.data() + row.size());
    }
    j["classes"].push_back(std::move(e));
  }
}

void to_json(nlohmann::json& j, const RepresentativeDays& r) {
  j = {{"per_variable", r.per_variable}, {"joint", r.joint}};
}

std::string representative_csv(const RepresentativeDays& r) {
  std::ostringstream out;
  out << "class,scope,variable,date,frequency";
  for (int h = 0; h < 24; ++h) out << ",h" << (h < 10 ? "0" : "") << h;
  out << '\n';
  auto emit = [&out](const ClassReport& rep, const std::string& scope) {
    for (std::size_t c = 0; c < rep.classes.size(); ++c) {
      const auto& dc = rep.classes[c];
      for (const auto& [v, m] : rep.profiles) {
        out << c << ',' << scope << ',' << info(v).name << ',' << format_date(rep.days[dc.representative]) << ','
            << dc.frequency;
        for (Eigen::Index h = 0; h < 24; ++h) out << ',' << m(static_cast<Eigen::Index>(dc.representative), h);
        out << '\n';
      }
    }
  };
  for (const auto& rep : r.per_variable) emit(rep, std::string(info(rep.variables.front()).name));
  emit(r.joint, "joint");
  return out.str();
}

// ---------------------------------------------------------------- sequences

namespace {

std::optional<Variable> variable_from_letter(char c) {
  switch (c) {
    case 't': return Variable::temp;
    case 'h': return Variable::rh;
    case 'w': return Variable::wind;
    case 'g': return Variable::ghi;
    case 'd': return Variable::dhi;
    case 'b': return Variable::bni;
    case 's': return Variable::sunfrac;
    case 'n': return Variable::okta;
    default: return std::nullopt;
  }
}

char letter_of(Variable v) {
  switch (v) {
    case Variable::temp: return 't';
    case Variable::rh: return 'h';
    case Variable::wind: return 'w';
    case Variable::ghi: return 'g';
    case Variable::dhi: return 'd';
    case Variable::bni: return 'b';
    case Variable::sunfrac: return 's';
    case Variable::okta: return 'n';
    default: return '?';
  }
}

double parse_bound(std::string_view s, double fallback) {
  if (s.empty()) return fallback;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw PreconditionError("bad criterion bound '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::vector<Predicate> parse_criteria(std::string_view text) {
  std::vector<Predicate> out;
  if (text.empty()) return out;
  for (auto item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 3 || parts[0].size() < 2)
      throw PreconditionError("criterion '" + std::string(item) + "' is not <var><kind>:<min>:<max>");
    const auto var = variable_from_letter(parts[0][0]);
    std::string_view kind_name = parts[0].substr(1);
    if (kind_name == "amp") kind_name = "amplitude";
    const auto kind = indicator_from_name(kind_name);
    if (!var || !kind) throw PreconditionError("unknown criterion '" + std::string(parts[0]) + "'");
    if (*kind == IndicatorKind::total && !is_radiative(*var))
      throw PreconditionError("daily total is only defined for radiation and insolation");
    Predicate p{*var, *kind, parse_bound(parts[1], -std::numeric_limits<double>::infinity()),
                parse_bound(parts[2], std::numeric_limits<double>::infinity())};
    if (!(p.lo <= p.hi)) throw PreconditionError("criterion '" + std::string(item) + "' has min > max");
    out.push_back(p);
  }
  return out;
}

std::string format_predicate(const Predicate& p) {
  std::string kind(to_string(p.kind));
  if (p.kind == IndicatorKind::amplitude) kind = "amp";
  return std::string(1, letter_of(p.variable)) + kind;
}

namespace {

bool overlaps(const SequenceMatch& a, const SequenceMatch& b) {
  const HourStamp a_end = a.start + static_cast<HourStamp>(24 * a.length);
  const HourStamp b_end = b.start + static_cast<HourStamp>(24 * b.length);
  return a.start < b_end && b.start < a_end;
}

/// Window start positions (into `days`) covering `length` consecutive calendar days.
std::vector<std::size_t> window_starts(const std::vector<DayBlock>& days, std::size_t length) {
  std::vector<std::size_t> out;
  if (length == 0 || days.size() < length) return out;
  std::size_t run = 1;  // consecutive days ending at i
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (i > 0) run = days[i].day == days[i - 1].day + 24 ? run + 1 : 1;
    if (run >= length) out.push_back(i + 1 - length);
  }
  return out;
}

std::vector<SequenceMatch> drop_overlaps(std::vector<SequenceMatch> ranked) {
  std::vector<SequenceMatch> kept;
  for (auto& m : ranked)
    if (std::none_of(kept.begin(), kept.end(), [&](const auto& k) { return overlaps(k, m); })) kept.push_back(std::move(m));
  return kept;
}

std::vector<SequenceMatch> classified_windows(const WeatherSeries& series, const SequenceCriteria& criteria) {
  std::vector<Variable> vars = criteria.classify_variables;
  if (vars.empty())
    for (Variable v : {Variable::temp, Variable::rh, Variable::wind, Variable::ghi})
      if (series.has(v)) vars.push_back(v);
  if (vars.empty()) throw DataError("no variable available for classification");
  const auto rep = representative_days(series, vars, std::nullopt);
  const auto days = complete_days(series, vars);
  const auto starts = window_starts(days, criteria.length);
  const std::set<std::size_t> valid(starts.begin(), starts.end());

  std::vector<SequenceMatch> out;
  const auto& scores = rep.joint.scores;
  for (std::size_t c = 0; c < rep.joint.classes.size(); ++c) {
    const auto& dc = rep.joint.classes[c];
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i : dc.members) {
      double d2 = 0.0;
      for (Eigen::Index d = 0; d < scores.cols(); ++d) {
        const double e = scores(static_cast<Eigen::Index>(i), d) - dc.centroid[static_cast<std::size_t>(d)];
        d2 += e * e;
      }
      ranked.emplace_back(d2, i);
    }
    std::sort(ranked.begin(), ranked.end());
    for (const auto& [d2, i] : ranked) {
      if (!valid.count(i)) continue;
      SequenceMatch m;
      m.start = days[i].day;
      m.length = criteria.length;
      m.distance = std::sqrt(d2);
      m.class_id = c;
      m.frequency = dc.frequency;
      out.push_back(m);
      break;
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.frequency > b.frequency; });
  return criteria.suppress_overlaps ? drop_overlaps(std::move(out)) : out;
}

}  // namespace

std::vector<SequenceMatch> search_sequences(const WeatherSeries& series, const SequenceCriteria& criteria) {
  if (criteria.length < 1) throw PreconditionError("sequence length must be at least 1 day");
  if (criteria.predicates.empty()) return classified_windows(series, criteria);

  std::vector<Variable> vars;
  for (const auto& p : criteria.predicates) {
    if (!series.has(p.variable)) throw DataError("series has no column " + std::string(info(p.variable).column));
    if (std::find(vars.begin(), vars.end(), p.variable) == vars.end()) vars.push_back(p.variable);
  }
  const auto days = complete_days(series, vars);
  std::vector<std::vector<double>> daily(criteria.predicates.size());
  for (std::size_t k = 0; k < criteria.predicates.size(); ++k) {
    const auto& p = criteria.predicates[k];
    const auto col = series.column(p.variable);
    for (const auto& d : days) daily[k].push_back(reduce_day(col.subspan(d.first, 24), p.kind));
  }

  std::vector<SequenceMatch> out;
  const double len = static_cast<double>(criteria.length);
  for (std::size_t s : window_starts(days, criteria.length)) {
    SequenceMatch m;
    m.start = days[s].day;
    m.length = criteria.length;
    bool ok = true;
    for (std::size_t k = 0; k < criteria.predicates.size() && ok; ++k) {
      const auto& p = criteria.predicates[k];
      double sum = 0.0;
      for (std::size_t i = s; i < s + criteria.length; ++i) sum += daily[k][i];
      const double a = sum / len;
      m.achieved.push_back(a);
      if (!(a >= p.lo && a <= p.hi)) {
        ok = false;
        break;
      }
      if (std::isfinite(p.lo) && std::isfinite(p.hi) && p.hi > p.lo)
        m.distance += std::abs(a - 0.5 * (p.lo + p.hi)) / (0.5 * (p.hi - p.lo));
    }
    if (ok) out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.distance < b.distance; });
  return criteria.suppress_overlaps ? drop_overlaps(std::move(out)) : out;
}

std::string sequences_csv(const SequenceCriteria& criteria, const std::vector<SequenceMatch>& matches) {
  std::ostringstream out;
  out << "rank,start,end,days";
  for (const auto& p : criteria.predicates) out << ',' << format_predicate(p);
  out << ",distance,class,frequency\n";
  for (std::size_t r = 0; r < matches.size(); ++r) {
    const auto& m = matches[r];
    out << r + 1 << ',' << format_date(m.start) << ','
        << format_date(m.start + static_cast<HourStamp>(24 * (m.length - 1))) << ',' << m.length;
    for (double a : m.achieved) out << ',' << a;
    out << ',' << m.distance << ',';
    if (m.class_id) out << *m.class_id;
    out << ',' << m.frequency << '\n';
  }
  return out.str();
}

}  // namespace synthmet
