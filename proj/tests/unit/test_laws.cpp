#include <cmath>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "synthmet/error.hpp"
#include "synthmet/laws.hpp"

using namespace synthmet;

namespace {

std::vector<double> weibull_sample(double k, double lambda, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::weibull_distribution<double> w(k, lambda);
  std::vector<double> v(n);
  for (double& x : v) x = w(rng);
  return v;
}

// Simpson integral of f on [a, b].
template <class F>
double integrate(F&& f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace

TEST(Normal, CdfAndQuantileAgree) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(normal_cdf(1.959963984540054), 0.975, 1e-12);
  for (double p = 0.001; p < 1.0; p += 0.0437) EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12);
  EXPECT_THROW(normal_quantile(0.0), PreconditionError);
}

TEST(Weibull, ClosedForms) {
  const WeibullLaw w{2.0, 5.0};
  EXPECT_NEAR(w.cdf(5.0), 1 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(w.mean(), 5.0 * std::tgamma(1.5), 1e-12);
  EXPECT_NEAR(integrate([&](double x) { return w.pdf(x); }, 0.0, 7.0), w.cdf(7.0), 1e-9);
  for (double p : {0.01, 0.3, 0.5, 0.99}) EXPECT_NEAR(w.cdf(w.quantile(p)), p, 1e-12);
}

TEST(Weibull, MleRecoversParameters) {
  std::uint64_t seed = 10;
  for (double k : {1.0, 2.0, 3.5})
    for (double lambda : {3.0, 5.0, 8.0}) {
      const auto f = fit_weibull(weibull_sample(k, lambda, 20000, seed++));
      EXPECT_NEAR(f.law.shape, k, 0.03 * k) << k << " " << lambda;
      EXPECT_NEAR(f.law.scale, lambda, 0.03 * lambda) << k << " " << lambda;
      EXPECT_EQ(f.n, 20000u);
    }
}

TEST(Weibull, MleSatisfiesScoreEquations) {
  const auto v = weibull_sample(1.7, 4.0, 5000, 3);
  const auto f = fit_weibull(v);
  const double k = f.law.shape;
  double s0 = 0, s1 = 0, sl = 0;
  for (double x : v) {
    const double xk = std::pow(x, k);
    s0 += xk, s1 += xk * std::log(x), sl += std::log(x);
  }
  const double n = static_cast<double>(v.size());
  EXPECT_NEAR(s1 / s0 - 1.0 / k - sl / n, 0.0, 1e-8);
  EXPECT_NEAR(f.law.scale, std::pow(s0 / n, 1.0 / k), 1e-8 * f.law.scale);
  double ll = 0;
  for (double x : v) ll += std::log(f.law.pdf(x));
  EXPECT_NEAR(f.log_likelihood, ll, 1e-6 * std::abs(ll));
}

TEST(Weibull, CalmsAndDegenerateSamples) {
  auto v = weibull_sample(2.0, 5.0, 1000, 4);
  for (std::size_t i = 0; i < 100; ++i) v[i] = 0.0;
  const auto f = fit_weibull(v);
  EXPECT_NEAR(f.zero_fraction, 0.1, 1e-12);
  EXPECT_EQ(f.n, 900u);
  EXPECT_THROW(fit_weibull(std::vector<double>(500, 0.0)), DataError);
  EXPECT_THROW(fit_weibull(std::vector<double>(50, 1.0)), DataError);
  EXPECT_THROW(fit_weibull(std::vector<double>{1.0, std::nan("")}), PreconditionError);
}

TEST(Clearness, PaddedMomentsOnUniform) {
  std::vector<double> v;
  for (int i = 0; i < 10000; ++i) v.push_back(0.3 + 0.4 * (i + 0.5) / 10000.0);
  const auto law = fit_clearness_law(v, Climate::tropical);
  EXPECT_NEAR(law.lo, 0.28002, 1e-12);
  EXPECT_NEAR(law.hi, 0.71998, 1e-12);
  // oracle: method of moments on the rescaled sample
  double mean = 0, var = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  for (double x : v) var += (x - mean) * (x - mean);
  var /= v.size() - 1;
  const double m = (mean - law.lo) / (law.hi - law.lo), s2 = var / std::pow(law.hi - law.lo, 2);
  const double c = m * (1 - m) / s2 - 1;
  EXPECT_NEAR(law.alpha, m * c, 1e-9);
  EXPECT_NEAR(law.beta, (1 - m) * c, 1e-9);
  EXPECT_NEAR(law.alpha, 1.315, 0.01);
  EXPECT_NEAR(law.mean(), mean, 1e-12);
}

TEST(Clearness, CdfQuantileInverseProperty) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> a(0.5, 6), lo(0.0, 0.3), w(0.3, 0.7), p(0.001, 0.999);
  for (int i = 0; i < 100; ++i) {
    ClearnessLaw law;
    law.alpha = a(rng), law.beta = a(rng), law.lo = lo(rng), law.hi = law.lo + w(rng);
    const double q = p(rng);
    const double x = law.quantile(q);
    EXPECT_GE(x, law.lo);
    EXPECT_LE(x, law.hi);
    EXPECT_NEAR(law.cdf(x), q, 1e-9);
  }
}

TEST(Clearness, Preconditions) {
  EXPECT_THROW(fit_clearness_law(std::vector<double>(10, 0.5), Climate::tropical), DataError);
  EXPECT_THROW(fit_clearness_law(std::vector<double>(40, 0.5), Climate::tropical), DataError);
  std::vector<double> bad(40, 0.5);
  bad[3] = 1.0;
  EXPECT_THROW(fit_clearness_law(bad, Climate::tropical), DataError);
  EXPECT_THROW(climate_from_name("arctic"), PreconditionError);
}

TEST(NormalScore, RanksAndTies) {
  const std::vector<double> v = {3.0, 1.0, 2.0, 2.0};
  const auto r = normal_score(v);
  EXPECT_NEAR(r.scores[1], normal_quantile(0.5 / 4), 1e-12);
  EXPECT_EQ(r.scores[2], r.scores[3]);
  EXPECT_NEAR(r.scores[2], normal_quantile(2.0 / 4), 1e-12);
  EXPECT_NEAR(r.map.inverse(r.map.forward(2.5)), 2.5, 1e-12);
  EXPECT_EQ(r.map.inverse(100.0), 3.0);
  EXPECT_EQ(r.map.inverse(-100.0), 1.0);
}

TEST(Marginal, TransformRoundTripProperty) {
  ClearnessLaw c;
  c.lo = 0.2, c.hi = 0.8, c.alpha = 2.5, c.beta = 1.5;
  const std::vector<Marginal> ms = {std::monostate{}, WeibullLaw{2.0, 5.0}, c};
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (const auto& m : ms)
    for (int i = 0; i < 200; ++i) {
      const double z = g(rng);
      EXPECT_NEAR(to_normal(m, from_normal(m, z)), z, 1e-6) << marginal_tag(m);
    }
}

TEST(Marginal, JsonRoundTrip) {
  ClearnessLaw c;
  c.lo = 0.1, c.hi = 0.9, c.alpha = 2, c.beta = 3, c.fitted_mean = 0.42, c.n = 99;
  const auto ns = normal_score(std::vector<double>{1, 2, 3, 5}).map;
  for (const Marginal& m : {Marginal{}, Marginal{WeibullLaw{1.5, 4}}, Marginal{c}, Marginal{ns}}) {
    const nlohmann::json j = m;
    const auto back = nlohmann::json::parse(j.dump()).get<Marginal>();
    EXPECT_TRUE(back == m) << j.dump();
  }
  EXPECT_THROW(nlohmann::json({{"type", "weibull"}, {"shape", -1}, {"scale", 1}}).get<WeibullLaw>(), DataError);
}

TEST(Ks, DistanceOfExactQuantilesIsSmall) {
  const WeibullLaw w{2.0, 5.0};
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(w.quantile((i + 0.5) / 1000));
  EXPECT_NEAR(ks_distance(v, [&](double x) { return w.cdf(x); }), 0.0005, 1e-9);
}
