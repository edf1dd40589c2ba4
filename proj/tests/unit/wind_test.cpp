#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "test_rng.hpp"
#include "windflow/wind/distribution.hpp"
#include "windflow/wind/power_curve.hpp"
#include "windflow/wind/scenarios.hpp"

namespace ww = windflow::wind;
using windflow::testing::Rng;

namespace {

const std::filesystem::path kCurves = std::filesystem::path(WINDFLOW_TEST_DATA_DIR) / "curves";

double integrate(const ww::WindDistribution& d, double a, double b, int n) {
  // Composite Simpson.
  const double h = (b - a) / n;
  double s = d.pdf(a) + d.pdf(b);
  for (int i = 1; i < n; ++i) s += d.pdf(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Farm-level list with explicit weights; speeds and powers are placeholders.
ww::FarmScenarioList weighted_list(const std::string& id, const std::vector<double>& weights, double mw = 10.0) {
  ww::FarmScenarioList l{id, 0.15, 0.95, {}};
  for (double w : weights) l.entries.push_back({5.0, {5.0}, mw, w});
  return l;
}

windflow::grid::WindFarm farm(const std::string& model, int count, double rated) {
  windflow::grid::WindFarm f;
  f.id = "WF";
  f.bus = "1";
  f.turbines.push_back({model, count, rated});
  return f;
}

}  // namespace

TEST(Distribution, DensitiesIntegrateToOne) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = ww::WindDistribution::weibull(rng.uniform(2.0, 4.0), rng.uniform(3.0, 12.0));
    EXPECT_NEAR(integrate(w, 0.0, 60.0, 20000), 1.0, 1e-6) << w.shape << " " << w.scale;
    const auto r = ww::WindDistribution::rayleigh(rng.uniform(2.0, 10.0));
    EXPECT_NEAR(integrate(r, 0.0, 60.0, 20000), 1.0, 1e-6) << r.scale;
  }
}

TEST(Distribution, QuantileInvertsCdf) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = trial % 2 ? ww::WindDistribution::weibull(rng.uniform(1.2, 4.0), rng.uniform(3.0, 12.0))
                             : ww::WindDistribution::rayleigh(rng.uniform(2.0, 10.0));
    const double p = rng.uniform(0.0, 0.999);
    EXPECT_NEAR(d.cdf(d.quantile(p)), p, 1e-12);
  }
}

TEST(Fit, WeibullRecoversKnownParameters) {
  const auto data = ww::sample(ww::WindDistribution::weibull(2.0, 8.0), 10000, 2024);
  const auto d = ww::fit_distribution(data, ww::Family::Weibull);
  EXPECT_NEAR(d.shape, 2.0, 0.1);
  EXPECT_NEAR(d.scale, 8.0, 0.2);
  EXPECT_EQ(d.source_sample_size, 10000u);
}

TEST(Fit, RayleighOfWeibullTwoDataMatchesScaleOverRootTwo) {
  const auto data = ww::sample(ww::WindDistribution::weibull(2.0, 8.0), 10000, 2024);
  const auto d = ww::fit_distribution(data, ww::Family::Rayleigh);
  EXPECT_NEAR(d.scale, 8.0 / std::sqrt(2.0), 0.1);
}

TEST(Fit, WeibullEstimateIsAStationaryPointOfTheLikelihood) {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = ww::sample(ww::WindDistribution::weibull(rng.uniform(1.5, 3.5), rng.uniform(4.0, 12.0)),
                                 static_cast<std::size_t>(rng.integer(30, 3000)), 100 + trial);
    const auto d = ww::fit_distribution(data, ww::Family::Weibull);
    auto loglik = [&](double k, double lambda) {
      double s = 0.0;
      for (double x : data) s += std::log(ww::WindDistribution::weibull(k, lambda).pdf(x));
      return s;
    };
    const double h = 1e-5;
    const double n = static_cast<double>(data.size());
    EXPECT_NEAR((loglik(d.shape + h, d.scale) - loglik(d.shape - h, d.scale)) / (2 * h) / n, 0.0, 1e-6);
    EXPECT_NEAR((loglik(d.shape, d.scale + h) - loglik(d.shape, d.scale - h)) / (2 * h) / n, 0.0, 1e-6);
  }
}

TEST(Fit, RejectsBadSamples) {
  const std::vector<double> same(30, 5.0);
  EXPECT_THROW((void)ww::fit_distribution(same, ww::Family::Weibull), std::invalid_argument);
  EXPECT_THROW((void)ww::fit_distribution(same, ww::Family::Rayleigh), std::invalid_argument);
  std::vector<double> few(29, 1.0);
  few[0] = 2.0;
  EXPECT_THROW((void)ww::fit_distribution(few, ww::Family::Weibull), std::invalid_argument);
  auto neg = ww::sample(ww::WindDistribution::weibull(2.0, 8.0), 50, 1);
  neg[7] = 0.0;
  EXPECT_THROW((void)ww::fit_distribution(neg, ww::Family::Weibull), std::invalid_argument);
}

TEST(Distribution, SamplingIsSeeded) {
  const auto d = ww::WindDistribution::rayleigh(5.0);
  EXPECT_EQ(ww::sample(d, 100, 9), ww::sample(d, 100, 9));
  EXPECT_NE(ww::sample(d, 100, 9), ww::sample(d, 100, 10));
}

TEST(PowerCurve, LinearInterpolation) {
  const auto c = ww::PowerCurve::from_points("t", {{4.0, 0.0}, {5.0, 0.4}, {6.0, 0.8}, {25.0, 0.8}});
  EXPECT_DOUBLE_EQ(ww::power_output(c, 5.5), 0.6);
  EXPECT_DOUBLE_EQ(ww::power_output(c, 5.0), 0.4);
  EXPECT_EQ(ww::power_output(c, 3.9), 0.0);
  EXPECT_EQ(ww::power_output(c, 25.1), 0.0);
  EXPECT_DOUBLE_EQ(c.rated_mw, 0.8);
}

TEST(PowerCurve, DatasheetFilesStayWithinRating) {
  const auto curves = ww::load_power_curves(kCurves);
  ASSERT_EQ(curves.count("VESTAS-V90-3.0"), 1u);
  ASSERT_EQ(curves.count("MERVENTO-3.6-118"), 1u);
  EXPECT_DOUBLE_EQ(curves.at("VESTAS-V90-3.0").rated_mw, 3.0);
  EXPECT_DOUBLE_EQ(curves.at("MERVENTO-3.6-118").rated_mw, 3.6);
  Rng rng(14);
  for (const auto& [name, c] : curves) {
    for (const auto& [u, p] : c.points) EXPECT_EQ(ww::power_output(c, u), p) << name;
    for (int i = 0; i < 1000; ++i) {
      const double p = ww::power_output(c, rng.uniform(0.0, 40.0));
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, c.rated_mw);
    }
  }
}

TEST(PowerCurve, RejectsUnorderedSpeeds) {
  EXPECT_THROW((void)ww::PowerCurve::from_points("t", {{5.0, 0.1}, {5.0, 0.2}}), std::invalid_argument);
  EXPECT_THROW((void)ww::PowerCurve::from_points("t", {{5.0, -0.1}, {6.0, 0.2}}), std::invalid_argument);
}

TEST(FarmScenarios, TwentyVestasNeverExceedSixtyMegawatts) {
  const auto curves = ww::load_power_curves(kCurves);
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = ww::WindDistribution::weibull(rng.uniform(1.5, 3.0), rng.uniform(5.0, 14.0));
    const auto l = ww::farm_scenarios(farm("VESTAS-V90-3.0", 20, 3.0), d, curves, rng.integer(1, 8), trial);
    for (const auto& e : l.entries) {
      EXPECT_LE(e.power_mw, 60.0 + 1e-12);
      EXPECT_EQ(e.speeds.size(), 20u);
    }
  }
}

TEST(FarmScenarios, StrataAndJitter) {
  const auto curves = ww::load_power_curves(kCurves);
  const auto d = ww::WindDistribution::weibull(2.0, 8.0);
  const auto l = ww::farm_scenarios(farm("MERVENTO-3.6-118", 30, 3.6), d, curves, 4, 5);
  ASSERT_EQ(l.entries.size(), 4u);
  for (int j = 0; j < 4; ++j) {
    const auto& e = l.entries[static_cast<std::size_t>(j)];
    EXPECT_DOUBLE_EQ(e.base_speed, d.quantile((j + 0.5) / 4.0));
    double power = 0.0, weight = 0.0;
    for (double u : e.speeds) {
      EXPECT_GE(u, 0.95 * e.base_speed);
      EXPECT_LE(u, 1.05 * e.base_speed);
      power += ww::power_output(curves.at("MERVENTO-3.6-118"), u);
      weight += d.pdf(u);
    }
    EXPECT_DOUBLE_EQ(e.power_mw, power);
    EXPECT_DOUBLE_EQ(e.weight, weight);
  }
}

TEST(FarmScenarios, FixedSeedIsReproducible) {
  const auto curves = ww::load_power_curves(kCurves);
  const auto d = ww::WindDistribution::rayleigh(6.0);
  const auto a = ww::farm_scenarios(farm("VESTAS-V90-3.0", 20, 3.0), d, curves, 3, 77);
  const auto b = ww::farm_scenarios(farm("VESTAS-V90-3.0", 20, 3.0), d, curves, 3, 77);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(a.entries[j].speeds, b.entries[j].speeds);
}

TEST(FarmScenarios, Errors) {
  const auto curves = ww::load_power_curves(kCurves);
  const auto d = ww::WindDistribution::rayleigh(6.0);
  EXPECT_THROW((void)ww::farm_scenarios(farm("VESTAS-V90-3.0", 20, 3.0), d, curves, 0, 1), std::invalid_argument);
  EXPECT_THROW((void)ww::farm_scenarios(farm("UNKNOWN", 20, 3.0), d, curves, 2, 1), std::invalid_argument);
  EXPECT_THROW((void)ww::farm_scenarios(farm("VESTAS-V90-3.0", 20, 3.6), d, curves, 2, 1), std::invalid_argument);
}

TEST(FarmScenarios, FasterWindInTheRisingRegionNeverLowersOutput) {
  const auto curves = ww::load_power_curves(kCurves);
  Rng rng(16);
  for (const auto& [name, c] : curves) {
    // Rising region: from cut-in to the first rated point.
    double top = c.points.front().first;
    for (const auto& [u, p] : c.points) {
      if (p >= c.rated_mw) {
        top = u;
        break;
      }
    }
    for (int trial = 0; trial < 200; ++trial) {
      double before = 0.0, after = 0.0;
      for (int t = 0; t < 10; ++t) {
        const double u = rng.uniform(c.points.front().first, top);
        before += ww::power_output(c, u);
        after += ww::power_output(c, std::min(top, u + rng.uniform(0.0, 2.0)));
      }
      EXPECT_GE(after, before - 1e-12) << name;
    }
  }
}

TEST(Combine, FourFarmsOfThreeGiveEightyOne) {
  std::vector<ww::FarmScenarioList> lists;
  for (int e = 0; e < 4; ++e) lists.push_back(weighted_list("F" + std::to_string(e + 1), {1.0, 2.0, 3.0}));
  const auto set = ww::combine(lists, 100.0);
  ASSERT_EQ(set.size(), 81u);
  EXPECT_EQ(set.scenarios[0].choice, (std::vector<int>{0, 0, 0, 0}));
  EXPECT_EQ(set.scenarios[1].choice, (std::vector<int>{0, 0, 0, 1}));
  EXPECT_EQ(set.scenarios[3].choice, (std::vector<int>{0, 0, 1, 0}));
  EXPECT_EQ(set.scenarios[80].choice, (std::vector<int>{2, 2, 2, 2}));
  EXPECT_EQ(set.scenarios[80].j, 81);
}

TEST(Combine, EqualWeightsAreUniform) {
  std::vector<ww::FarmScenarioList> lists{weighted_list("A", {2.0, 2.0}), weighted_list("B", {0.5, 0.5})};
  for (const auto& s : ww::combine(lists, 100.0).scenarios) EXPECT_DOUBLE_EQ(s.pi, 0.25);
}

TEST(Combine, HandEnumeratedProbabilities) {
  std::vector<ww::FarmScenarioList> lists{weighted_list("A", {1, 1}), weighted_list("B", {1, 3}),
                                          weighted_list("C", {2, 2})};
  const auto set = ww::combine(lists, 100.0);
  ASSERT_EQ(set.size(), 8u);
  const double expected[8] = {1.0 / 16, 1.0 / 16, 3.0 / 16, 3.0 / 16, 1.0 / 16, 1.0 / 16, 3.0 / 16, 3.0 / 16};
  double total = 0.0;
  for (int j = 0; j < 8; ++j) {
    EXPECT_DOUBLE_EQ(set.scenarios[static_cast<std::size_t>(j)].pi, expected[j]);
    total += set.scenarios[static_cast<std::size_t>(j)].pi;
  }
  EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(Combine, SingleScenarioHasProbabilityOne) {
  std::vector<ww::FarmScenarioList> lists{weighted_list("A", {0.0371})};
  EXPECT_DOUBLE_EQ(ww::combine(lists, 100.0).scenarios[0].pi, 1.0);
}

TEST(Combine, WindowsFollowWakeLossAndPowerFactor) {
  std::vector<ww::FarmScenarioList> lists{weighted_list("A", {1.0}, 50.0)};
  const auto set = ww::combine(lists, 100.0);
  const auto& w = set.scenarios[0].farms[0];
  EXPECT_DOUBLE_EQ(w.p_max, 0.85 * 0.5);
  EXPECT_NEAR(w.q_max, 0.425 * std::tan(std::acos(0.95)), 1e-15);
  EXPECT_EQ(w.q_min, -w.q_max);
}

TEST(Combine, ProbabilitiesSumToOneForRandomConfigurations) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ww::FarmScenarioList> lists;
    std::size_t expected = 1;
    const int farms = rng.integer(1, 4);
    for (int e = 0; e < farms; ++e) {
      std::vector<double> w(static_cast<std::size_t>(rng.integer(1, 5)));
      for (auto& x : w) x = rng.uniform(1e-6, 10.0);
      expected *= w.size();
      lists.push_back(weighted_list("F" + std::to_string(e), w));
    }
    const auto set = ww::combine(lists, 100.0);
    EXPECT_EQ(set.size(), expected);
    double total = 0.0;
    for (const auto& s : set.scenarios) {
      EXPECT_GE(s.pi, 0.0);
      total += s.pi;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(Combine, MarginalsEqualNormalizedFarmWeights) {
  Rng rng(18);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ww::FarmScenarioList> lists;
    const int farms = rng.integer(1, 4);
    for (int e = 0; e < farms; ++e) {
      std::vector<double> w(static_cast<std::size_t>(rng.integer(1, 4)));
      for (auto& x : w) x = rng.uniform(0.1, 5.0);
      lists.push_back(weighted_list("F" + std::to_string(e), w));
    }
    const auto set = ww::combine(lists, 100.0);
    for (std::size_t e = 0; e < lists.size(); ++e) {
      double norm = 0.0;
      for (const auto& x : lists[e].entries) norm += x.weight;
      for (std::size_t c = 0; c < lists[e].entries.size(); ++c) {
        double marginal = 0.0;
        for (const auto& s : set.scenarios) {
          if (s.choice[e] == static_cast<int>(c)) marginal += s.pi;
        }
        EXPECT_NEAR(marginal, lists[e].entries[c].weight / norm, 1e-12);
      }
    }
  }
}

TEST(Combine, RejectsEmptyInput) {
  EXPECT_THROW((void)ww::combine({}, 100.0), std::invalid_argument);
  std::vector<ww::FarmScenarioList> lists{weighted_list("A", {})};
  EXPECT_THROW((void)ww::combine(lists, 100.0), std::invalid_argument);
}

TEST(ScenarioFile, RoundTrip) {
  std::vector<ww::FarmScenarioList> lists{weighted_list("A", {1, 3}, 12.5), weighted_list("B", {2, 1, 1}, 7.0)};
  const auto set = ww::combine(lists, 100.0);
  const auto back = ww::scenarios_from_json(nlohmann::json::parse(ww::to_json(set).dump()));
  ASSERT_EQ(back.size(), set.size());
  EXPECT_EQ(back.farm_ids, set.farm_ids);
  EXPECT_EQ(back.per_farm_counts, set.per_farm_counts);
  for (std::size_t j = 0; j < set.size(); ++j) {
    EXPECT_DOUBLE_EQ(back.scenarios[j].pi, set.scenarios[j].pi);
    EXPECT_EQ(back.scenarios[j].farms[1].p_max, set.scenarios[j].farms[1].p_max);
    EXPECT_EQ(back.scenarios[j].farms[1].q_min, set.scenarios[j].farms[1].q_min);
  }
}

TEST(ScenarioFile, RejectsBadDocuments) {
  auto doc = nlohmann::json::parse(R"({"format": "windflow-scenarios/1", "farms": ["A"],
    "scenarios": [{"j": 1, "pi": 0.5, "farms": {"A": {"p_max_pu": 0.1, "q_max_pu": 0.03}}}]})");
  EXPECT_THROW((void)ww::scenarios_from_json(doc), std::invalid_argument);
  doc["scenarios"][0]["pi"] = 1.0;
  EXPECT_EQ(ww::scenarios_from_json(doc).scenarios[0].farms[0].q_min, -0.03);
  doc["scenarios"][0]["farms"].erase("A");
  EXPECT_THROW((void)ww::scenarios_from_json(doc), std::invalid_argument);
  doc["format"] = "other";
  EXPECT_THROW((void)ww::scenarios_from_json(doc), std::invalid_argument);
}
