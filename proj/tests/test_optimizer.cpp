#include "snncrs/optimizer.hpp"
#include "snncrs/sampling.hpp"

#include <gtest/gtest.h>

using namespace snncrs;

namespace {

SearchBox unit_box(std::size_t res, std::size_t rounds) {
  SearchBox b;
  b.dims = {{"x", 0.0, 1.0, Scale::linear}};
  b.resolution = res;
  b.rounds = rounds;
  return b;
}

// max over beta of min{C((1-beta) a), C(b + c sqrt(beta))}, by bisection on
// the crossing (first term decreasing, second increasing in beta).
double two_node_df(const ChannelGains& ch) {
  auto f = [&](double beta) { return cap((1 - beta) * ch.h12 * ch.h12 * ch.P1); };
  auto g = [&](double beta) {
    return cap(ch.h14 * ch.h14 * ch.P1 + ch.h24 * ch.h24 * ch.P2 +
               2 * ch.h14 * ch.h24 * std::sqrt(beta * ch.P1 * ch.P2));
  };
  if (f(0) <= g(0)) return f(0);
  if (f(1) >= g(1)) return g(1);
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > g(mid) ? lo : hi) = mid;
  }
  return std::min(f(lo), g(lo));
}

}  // namespace

TEST(Optimize, QuadraticPeak) {
  const auto r = optimize([](std::span<const double> x) { return -(x[0] - 0.3) * (x[0] - 0.3); },
                          unit_box(11, 3));
  EXPECT_NEAR(r.params[0], 0.3, 1e-3);
}

TEST(Optimize, OffGridPeakIsRefined) {
  const auto r = optimize([](std::span<const double> x) { return -std::abs(x[0] - 0.4321); },
                          unit_box(11, 5));
  EXPECT_NEAR(r.params[0], 0.4321, 1e-6);
  EXPECT_GE(r.rate, r.grid_rate);
}

TEST(Optimize, ConstantObjectiveKeepsFirstGridPoint) {
  SearchBox b = unit_box(5, 3);
  b.dims.push_back({"y", 1e-2, 1e2, Scale::log});
  const auto r = optimize([](std::span<const double>) { return 0.75; }, b);
  EXPECT_EQ(r.rate, 0.75);
  EXPECT_EQ(r.params, (std::vector<double>{0.0, 1e-2}));
}

TEST(Optimize, GridIsLexicographicAndInclusive) {
  SearchBox b = unit_box(3, 0);
  b.dims.push_back({"y", 1e-2, 1e2, Scale::log});
  b.polish_restarts = 0;
  std::vector<std::vector<double>> seen;
  optimize(
      [&](std::span<const double> x) {
        seen.emplace_back(x.begin(), x.end());
        return 0.0;
      },
      b);
  ASSERT_EQ(seen.size(), 9u);
  EXPECT_EQ(seen[0], (std::vector<double>{0.0, 1e-2}));
  EXPECT_NEAR(seen[1][1], 1.0, 1e-12);
  EXPECT_EQ(seen[2], (std::vector<double>{0.0, 1e2}));
  EXPECT_EQ(seen[8], (std::vector<double>{1.0, 1e2}));
}

TEST(Optimize, MonotoneRounds) {
  auto f = [](std::span<const double> x) {
    return std::min({1 - x[0], 0.3 + x[1] * x[0], 2 * x[1] - x[0] * x[1]});
  };
  SearchBox b = unit_box(7, 6);
  b.dims.push_back({"y", 0.0, 1.0, Scale::linear});
  const auto r = optimize(f, b);
  ASSERT_EQ(r.round_rates.size(), 7u);
  for (std::size_t i = 1; i < r.round_rates.size(); ++i)
    EXPECT_GE(r.round_rates[i], r.round_rates[i - 1]);
  EXPECT_GE(r.rate, r.grid_rate);
}

TEST(Optimize, PolishFollowsRidge) {
  // the maximum sits on the line where the two branches of the min cross
  auto f = [](std::span<const double> x) {
    return std::min(x[0] + x[1] - 0.25 * x[0] * x[1], 1.0 - x[0] + 0.5 * x[1]) - x[1] * x[1];
  };
  SearchBox b = unit_box(5, 3);
  b.dims.push_back({"y", 0.0, 1.0, Scale::linear});
  b.polish_restarts = 0;
  const auto coordinate_only = optimize(f, b);
  b.polish_restarts = 3;
  const auto polished = optimize(f, b);
  EXPECT_GT(polished.rate, coordinate_only.rate + 1e-3);
  // oracle: dense grid
  double dense = -1;
  for (int i = 0; i <= 2000; ++i)
    for (int j = 0; j <= 2000; ++j) {
      const std::vector<double> x{i / 2000.0, j / 2000.0};
      dense = std::max(dense, f(x));
    }
  EXPECT_GE(polished.rate, dense - 1e-6);
}

TEST(Optimize, SeedsOutsideTheBoxAreUsed) {
  const auto r = optimize([](std::span<const double> x) { return x[0]; }, unit_box(5, 2),
                          {{1.5}});
  EXPECT_EQ(r.params[0], 1.5);
}

TEST(Optimize, Errors) {
  EXPECT_THROW(optimize([](std::span<const double>) { return 0.0; }, SearchBox{}),
               std::invalid_argument);
  SearchBox bad = unit_box(5, 1);
  bad.dims[0].scale = Scale::log;
  EXPECT_THROW(optimize([](std::span<const double>) { return 0.0; }, bad), std::invalid_argument);
  EXPECT_THROW(optimize([](std::span<const double>) { return NAN; }, unit_box(3, 1)),
               std::domain_error);
}

TEST(OptimizeScheme, BeatsRandomRestarts) {
  Rng rng(77);
  const auto ch = random_channel(rng);
  const auto best = optimize_scheme(ch, SchemeId::SNNC_RS_JOINT, default_box(SchemeId::SNNC_RS_JOINT));
  const auto f = scheme_objective(ch, SchemeId::SNNC_RS_JOINT, true);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double random_best = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const std::vector<double> x{u(rng), u(rng), log_uniform(rng, 1e-3, 1e3)};
    random_best = std::max(random_best, f(x));
  }
  EXPECT_GE(best.rate(), random_best - 1e-12);
}

TEST(OptimizeScheme, QuantizationUselessPushesNhatToBoxMax) {
  auto ch = line_network(0.3, 0.1, 1.0, 2.0, 1, 1, 1);
  ch.h32 = ch.h34 = ch.h13 = ch.h23 = 0.0;
  SchemeOptions o;
  o.fallbacks = false;
  const auto r = optimize_scheme(ch, SchemeId::DF_SNNC, default_box(SchemeId::DF_SNNC), o);
  EXPECT_EQ(r.opt.params[1], 1e3);
}

TEST(OptimizeScheme, RelayTwoSilentReducesToTwoNodeDf) {
  const auto ch = line_network(0.3, 0.1, 1.0, 2.0, 2, 2, 2).without_relay2();
  const auto r =
      optimize_scheme(ch, SchemeId::SNNC_RS_JOINT, default_box(SchemeId::SNNC_RS_JOINT));
  EXPECT_NEAR(r.rate(), two_node_df(ch), 1e-6);
}

TEST(OptimizeScheme, NoPathToDestination) {
  auto ch = line_network(0.3, 0.1, 1.0, 2.0, 1, 1, 1);
  ch.h14 = ch.h24 = ch.h34 = 0.0;
  for (SchemeId s : kAllSchemes) {
    const auto r = optimize_scheme(ch, s, default_box(s, 5, 1));
    EXPECT_NEAR(r.rate(), 0.0, 1e-12) << to_string(s);
  }
}

TEST(OptimizeScheme, BoxDimensionMismatch) {
  EXPECT_THROW(optimize_scheme(line_network(0.1, 0.05, 1, 2, 1, 1, 1), SchemeId::NNC,
                               default_box(SchemeId::DF_DF)),
               std::invalid_argument);
}

TEST(OptimizeScheme, SplittingNeverLosesToDfSnnc) {
  Rng rng(78);
  for (int i = 0; i < 5; ++i) {
    const auto ch = random_channel(rng);
    const auto rs = optimize_scheme(ch, SchemeId::SNNC_RS_JOINT, default_box(SchemeId::SNNC_RS_JOINT, 11, 3));
    const auto df = optimize_scheme(ch, SchemeId::DF_SNNC, default_box(SchemeId::DF_SNNC, 11, 3));
    EXPECT_GE(rs.rate(), df.rate() - 1e-9);
  }
}

TEST(OptimizeScheme, BindingBoundIsTheMinimum) {
  const auto ch = line_network(0.1, 0.05, 1.0, 2.0, 1, 1, 1);
  for (SchemeId s : kAllSchemes) {
    const auto r = optimize_scheme(ch, s, default_box(s, 7, 2));
    const auto& b = r.evaluation.bounds.binding();
    EXPECT_NEAR(std::max(0.0, b.value / b.multiplier), r.rate(), 1e-12) << to_string(s);
    EXPECT_EQ(r.evaluation.binding(), r.evaluation.config + "/" + b.name);
  }
}

TEST(OptimizeSchemes, JointNeverBelowSuccessive) {
  const std::vector<SchemeId> schemes{SchemeId::SNNC_RS_JOINT, SchemeId::SNNC_RS_SUCCESSIVE,
                                      SchemeId::CUTSET};
  for (double P : {2.15443469003, 4.64158883361, 10.0}) {
    const auto ch = line_network(0.1, 0.05, 1.0, 2.0, P, P, P);
    const auto r = optimize_schemes(ch, schemes, [](SchemeId s) { return default_box(s, 11, 3); });
    ASSERT_EQ(r.size(), 3u);
    EXPECT_GE(r.at(SchemeId::SNNC_RS_JOINT).rate(), r.at(SchemeId::SNNC_RS_SUCCESSIVE).rate() - 1e-12);
    EXPECT_LE(r.at(SchemeId::SNNC_RS_JOINT).rate(), r.at(SchemeId::CUTSET).rate() + 1e-6);
  }
}

TEST(Sweep, SingleCutsetRowOnTrivialChannel) {
  SweepSpec spec;
  NodePlacement pl;
  pl.nodes = {Point{0, 0}, Point{0, 1e6}, Point{1e6, 1e6}, Point{1, 0}};
  spec.placement = pl;
  spec.values = {1.0};
  spec.schemes = {SchemeId::CUTSET};
  spec.resolution = 5;
  spec.rounds = 1;
  const auto r = sweep(spec);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_NEAR(r.rows[0].rate, 1.0, 1e-9);
}

TEST(Sweep, DominanceOnReferenceGeometry) {
  SweepSpec spec;
  spec.values = {0.1, 3.0, 100.0};
  spec.resolution = 11;
  spec.rounds = 3;
  const auto r = sweep(spec);
  ASSERT_EQ(r.rows.size(), 3 * kAllSchemes.size());
  for (std::size_t i = 0; i < r.rows.size(); i += kAllSchemes.size()) {
    std::map<SchemeId, double> rate;
    for (std::size_t k = 0; k < kAllSchemes.size(); ++k) rate[r.rows[i + k].scheme] = r.rows[i + k].rate;
    EXPECT_GE(rate[SchemeId::SNNC_RS_JOINT], rate[SchemeId::DF_SNNC] - 1e-6);
    EXPECT_GE(rate[SchemeId::SNNC_RS_JOINT], rate[SchemeId::SNNC_RS_SUCCESSIVE] - 1e-12);
    for (auto [s, v] : rate) EXPECT_LE(v, rate[SchemeId::CUTSET] + 1e-6) << to_string(s);
  }
}

TEST(Sweep, InvalidGeometryRowsContinue) {
  SweepSpec spec;
  spec.parameter = SweepParameter::d12;
  spec.values = {0.1, 0.97, 0.2};
  spec.schemes = {SchemeId::DF_SNNC};
  spec.resolution = 5;
  spec.rounds = 1;
  const auto r = sweep(spec);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_TRUE(r.rows[0].valid);
  EXPECT_FALSE(r.rows[1].valid);
  EXPECT_TRUE(std::isnan(r.rows[1].rate));
  EXPECT_EQ(r.rows[1].binding, "invalid");
  EXPECT_TRUE(r.rows[1].flags.contains("error"));
  EXPECT_TRUE(r.rows[2].valid);
  EXPECT_NE(sweep_csv(r).find(",nan,\"invalid\""), std::string::npos);
}

TEST(Sweep, DeterministicOutput) {
  SweepSpec spec;
  spec.values = log_spaced(0.1, 100, 3);
  spec.resolution = 7;
  spec.rounds = 2;
  const auto a = sweep(spec), b = sweep(spec);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  EXPECT_EQ(sweep_json(a).dump(), sweep_json(b).dump());
  EXPECT_EQ(sweep_dat(a, spec.schemes), sweep_dat(b, spec.schemes));
}

TEST(Sweep, CsvLayout) {
  SweepSpec spec;
  spec.values = {1.0};
  spec.schemes = {SchemeId::DF_SNNC, SchemeId::NNC};
  spec.resolution = 5;
  spec.rounds = 1;
  const std::string csv = sweep_csv(sweep(spec));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "sweep_param,sweep_value,scheme,rate_bits,binding_bound,params_json,flags_json");
  EXPECT_NE(csv.find("P,1,DF_SNNC,"), std::string::npos);
  EXPECT_NE(csv.find("\"{\"\"beta\"\":"), std::string::npos);
}

TEST(Sweep, LogSpacing) {
  const auto v = log_spaced(0.1, 100, 10);
  ASSERT_EQ(v.size(), 10u);
  EXPECT_EQ(v.front(), 0.1);
  EXPECT_EQ(v.back(), 100.0);
  EXPECT_NEAR(v[3], 1.0, 1e-12);
  EXPECT_THROW(log_spaced(0, 1, 3), std::invalid_argument);
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  SweepSpec spec;
  spec.values = log_spaced(0.1, 100, 3);
  spec.schemes = {SchemeId::DF_SNNC, SchemeId::NNC, SchemeId::CUTSET};
  spec.resolution = 5;
  spec.rounds = 1;
  spec.threads = 1;
  const auto one = sweep_csv(sweep(spec));
  spec.threads = 4;
  EXPECT_EQ(sweep_csv(sweep(spec)), one);
}
