#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "patterndyn/analysis.hpp"

using namespace patterndyn;

namespace {

UnitVector unit(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return UnitVector::normalized(out);
}

DistSpec opposite_spec(Index d, Index k, std::uint64_t seed) {
  Rng rng(seed);
  const UnitVector p = sample_unit_sphere(d, rng);
  return DistSpec::make(DistKind::clean, k, 0.0, PatternBasis({p, -p}));
}

FilterBank ideal_bank(const DistSpec& spec) {
  Matrix filters(2, spec.d);
  filters.row(0) = spec.patterns[0].coords().transpose();
  filters.row(1) = spec.patterns[1].coords().transpose();
  Vector a(2);
  a << 1, -1;
  return FilterBank::make(filters, a, Mode::fixed_output);
}

TrajectoryRecord record_of(std::vector<std::pair<double, double>> norm_sin) {
  TrajectoryRecord rec;
  for (auto [n, s] : norm_sin) {
    FilterSnapshot f;
    f.norm = n;
    f.sin_theta = s;
    rec.filters.push_back(f);
  }
  return rec;
}

}  // namespace

TEST_CASE("target_pattern") {
  const UnitVector p = unit({1, 0, 0});
  const PatternBasis opp({p, -p});
  CHECK(target_pattern(opp, -1, Regime::opposite).direction.coords() == (-p).coords());
  CHECK(target_pattern(opp, 1, Regime::opposite).direction.coords() == p.coords());

  const PatternBasis ortho({unit({1, 0, 0}), unit({0, 1, 0})});
  CHECK(target_pattern(ortho, 1, Regime::obtuse).direction.coords() == ortho[0].coords());
  CHECK(target_pattern(ortho, -1, Regime::obtuse).direction.coords() == ortho[1].coords());

  const double rho = 0.472;
  const PatternBasis sharp({unit({1, 0, 0}), unit({rho, std::sqrt(1 - rho * rho), 0})});
  const Vector expected = (sharp[0].coords() - rho * sharp[1].coords()).normalized();
  CHECK((target_pattern(sharp, 1, Regime::sharp).direction.coords() - expected).norm() <= 1e-12);
  const Vector expected_neg = (sharp[1].coords() - rho * sharp[0].coords()).normalized();
  CHECK((target_pattern(sharp, -1, Regime::sharp).direction.coords() - expected_neg).norm() <= 1e-12);

  try {
    target_pattern(ortho, 1, Regime::sharp);
    FAIL("accepted");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::regime_mismatch);
  }

  const PatternBasis four({unit({1, 0, 0, 0}), unit({0, 1, 0, 0}), unit({0, 0, 1, 0}), unit({0, 0, 0, 1})});
  const std::array<double, 2> second_wins{0.1, 0.3};
  CHECK(target_pattern(four, 1, Regime::multi, second_wins).direction.coords() == four[1].coords());
  CHECK(target_pattern(four, -1, Regime::multi, second_wins).direction.coords() == four[3].coords());
  const std::array<double, 2> tied{0.2, 0.2};
  try {
    target_pattern(four, 1, Regime::multi, tied);
    FAIL("accepted");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::tie);
  }

  // Unit norm and indifference to how the span is scaled.
  Rng rng(60);
  for (int i = 0; i < 100; ++i) {
    const UnitVector a = sample_unit_sphere(6, rng), b = sample_unit_sphere(6, rng);
    const Regime r = a.coords().dot(b.coords()) > 0 ? Regime::sharp : Regime::obtuse;
    const PatternBasis pb({a, b});
    const PatternBasis scaled({UnitVector::normalized(3.0 * a.coords()), UnitVector::normalized(0.2 * b.coords())});
    for (int s : {1, -1}) {
      const Vector t = target_pattern(pb, s, r).direction.coords();
      CHECK(std::abs(t.norm() - 1.0) <= 1e-12);
      CHECK((t - target_pattern(scaled, s, r).direction.coords()).norm() <= 1e-12);
    }
  }
}

TEST_CASE("mc_accuracy") {
  SUBCASE("ideal bank is perfect") {
    const DistSpec spec = opposite_spec(8, 3, 61);
    Rng rng(62);
    const Accuracy acc = mc_accuracy(ideal_bank(spec), spec, 5000, rng);
    CHECK(acc.accuracy == 1.0);
    CHECK(acc.tie_fraction == 0.0);
    CHECK(acc.n == 5000);
  }
  SUBCASE("zero bank ties everywhere, and ties are errors") {
    const DistSpec spec = opposite_spec(8, 3, 61);
    const FilterBank zero = FilterBank::make(Matrix::Zero(2, 8), Vector::Ones(2), Mode::fixed_output);
    Rng a(63), b(63);
    const Accuracy acc = mc_accuracy(zero, spec, 4000, a);
    CHECK(acc.accuracy == 0.0);
    CHECK(acc.tie_fraction == 1.0);
    // The label classify() falls back to still matches every negative.
    int neg = 0, matched = 0;
    for (int i = 0; i < 4000; ++i) {
      const LabeledSample s = sample(spec, b);
      neg += s.y == -1;
      matched += classify(s.x, zero).label == s.y;
    }
    CHECK(matched == neg);
  }
  SUBCASE("random h = 2 banks average to chance") {
    // Single banks spread widely (roughly 0 to 0.9); only the mean is pinned.
    const DistSpec spec = opposite_spec(8, 3, 64);
    constexpr int n = 200;
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t seed = 0; seed < n; ++seed) {
      Rng init(seed);
      Rng test(seed + 1000);
      const double acc = mc_accuracy(init_filters(2, 8, init), spec, 2000, test).accuracy;
      sum += acc;
      sum2 += acc * acc;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 0.5) <= 4.0 * se);
  }
  SUBCASE("ideal bank across all four laws") {
    const Index k = 3;
    const double eps = std::ldexp(1.0, -2 * static_cast<int>(k) - 2);  // below 2^(-2k-1)
    Rng prng(65);
    const UnitVector p = sample_unit_sphere(10, prng);
    const UnitVector q = UnitVector::normalized(sample_unit_orthocomplement(PatternBasis({p}), prng).coords());
    for (DistKind kind : {DistKind::clean, DistKind::noisy, DistKind::general_noisy}) {
      for (const PatternBasis& pats : {PatternBasis({p, -p}), PatternBasis({p, q})}) {
        const DistSpec spec = DistSpec::make(kind, k, kind == DistKind::clean ? 0.0 : eps, pats);
        Rng rng(66);
        CHECK(mc_accuracy(ideal_bank(spec), spec, 3000, rng).accuracy == 1.0);
      }
    }
    Matrix eye = Matrix::Identity(10, 10);
    std::vector<UnitVector> four;
    for (Index i = 0; i < 4; ++i) four.emplace_back(Vector(eye.col(i)));
    const DistSpec multi = DistSpec::make(DistKind::multi_clean, k, 0.0, PatternBasis(four));
    Vector a(4);
    a << 1, 1, -1, -1;
    const FilterBank bank = FilterBank::make(Matrix(eye.topRows(4)), a, Mode::fixed_output);
    Rng rng(67);
    CHECK(mc_accuracy(bank, multi, 3000, rng).accuracy == 1.0);
  }
}

TEST_CASE("fit_power_law") {
  std::vector<double> t, v;
  for (int i = 0; i < 50; ++i) {
    const double ti = std::pow(10.0, 1.0 + 2.0 * i / 49.0);
    t.push_back(ti);
    v.push_back(3.0 * std::pow(ti, -0.5));
  }
  const std::array<double, 2> window{10.0, 1000.0};
  SUBCASE("exact series") {
    const RateFit fit = fit_power_law(t, v, window);
    CHECK(std::abs(fit.exponent + 0.5) <= 1e-9);
    CHECK(std::abs(fit.intercept - std::log(3.0)) <= 1e-9);
    CHECK(fit.r_squared >= 1.0 - 1e-12);
    CHECK(fit.n_points == 50);
  }
  SUBCASE("constant series") {
    const std::vector<double> c(t.size(), 0.7);
    const RateFit fit = fit_power_law(t, c, window);
    CHECK(std::abs(fit.exponent) <= 1e-9);
    CHECK(fit.r_squared == 1.0);
  }
  SUBCASE("scaling moves the intercept only") {
    std::vector<double> scaled = v;
    for (double& x : scaled) x *= 17.0;
    const RateFit a = fit_power_law(t, v, window), b = fit_power_law(t, scaled, window);
    CHECK(std::abs(a.exponent - b.exponent) <= 1e-12);
    CHECK(std::abs(b.intercept - a.intercept - std::log(17.0)) <= 1e-9);
  }
  SUBCASE("noisy series") {
    Rng rng(68);
    int good = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> noisy(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) noisy[i] = std::pow(t[i], -0.5) * std::exp(0.1 * rng.normal());
      good += std::abs(fit_power_law(t, noisy, window).exponent + 0.5) <= 0.05;
    }
    CHECK(good >= 950);
  }
  SUBCASE("domain errors") {
    auto code_of = [&](std::span<const double> tt, std::span<const double> vv, std::array<double, 2> w) {
      try {
        fit_power_law(tt, vv, w);
      } catch (const Error& err) {
        return err.code();
      }
      return ErrorCode::io;
    };
    std::vector<double> with_zero = v;
    with_zero[10] = 0.0;
    CHECK(code_of(t, with_zero, window) == ErrorCode::fit_domain);
    CHECK(code_of(t, v, {10.0, 100.0}) == ErrorCode::fit_domain);  // one decade
    const std::vector<double> few_t{10, 100, 1000}, few_v{1, 1, 1};
    CHECK(code_of(few_t, few_v, window) == ErrorCode::fit_domain);
  }
  SUBCASE("trailing window") {
    const auto w = trailing_window(1e5, 1.5);
    CHECK(w[1] == 1e5);
    CHECK(std::abs(w[0] - 1e5 / std::pow(10.0, 1.5)) <= 1e-9);
  }
}

TEST_CASE("estimate_mu and check_A2") {
  SUBCASE("large-sample limits") {
    const DistSpec spec = opposite_spec(10, 3, 69);
    Rng data_rng(70);
    const Dataset ds = empirical_dataset(spec, 100000, data_rng);
    Rng probe_rng(71);
    const MuEstimate mu = estimate_mu(ds, 1, probe_rng);
    CHECK(std::abs(mu.mu_pos - 0.125) <= 0.02);
    CHECK(std::abs(mu.mu_neg - 0.125) <= 0.02);
    Rng a2_rng(72);
    const A2Check a2 = check_A2(ds, 4, 0.02, a2_rng);
    CHECK(a2.max_abs_mean <= 0.02);
    CHECK(a2.pass);
  }
  SUBCASE("k = 1 gives the label frequencies") {
    const DistSpec spec = opposite_spec(5, 1, 73);
    Rng data_rng(74);
    const Dataset ds = empirical_dataset(spec, 2000, data_rng);
    int pos = 0;
    for (const auto& s : ds.samples) pos += s.y == 1;
    Rng probe_rng(75);
    const MuEstimate mu = estimate_mu(ds, 8, probe_rng);
    CHECK(mu.mu_pos == doctest::Approx(pos / 2000.0));
    CHECK(mu.mu_neg == doctest::Approx(1.0 - pos / 2000.0));
  }
  SUBCASE("a single positive sample") {
    const DistSpec spec = opposite_spec(6, 3, 76);
    Rng rng(77);
    Dataset ds{{sample_with_label(spec, 1, rng)}, spec, 0};
    Rng probe_rng(78);
    CHECK(estimate_mu(ds, 16, probe_rng).mu_neg == 0.0);

    // One direction, one sample: the mean is the response itself.
    Rng a(79), b(79);
    const A2Check a2 = check_A2(ds, 1, 1e-9, a);
    const Vector probe = orthocomplement_probes(spec, 1, b).front();
    const double f = unit_response(ds.samples[0].x, probe).value;
    CHECK(a2.max_abs_mean == doctest::Approx(f));
    CHECK(check_A2(ds, 64, 1.0, probe_rng).pass);
  }
  SUBCASE("empty and non-opposite datasets") {
    const DistSpec spec = opposite_spec(6, 3, 80);
    Dataset empty{{}, spec, 0};
    Rng rng(81);
    try {
      estimate_mu(empty, 4, rng);
      FAIL("accepted");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::empty_dataset);
    }
    CHECK_THROWS_AS(check_A2(empty, 4, 0.1, rng), Error);
  }
}

TEST_CASE("norm_domination") {
  const NormDomination same = norm_domination(record_of({{1, 0.5}, {1, 0.5}, {1, 0.5}, {1, 0.5}}));
  CHECK(same.top_norm_ratio == 1.0);
  CHECK_FALSE(same.aligned_are_dominant);

  const NormDomination clear =
      norm_domination(record_of({{10, 0.01}, {1, 0.9}, {1.1, 0.8}, {0.9, 0.7}, {1.0, 0.95}, {1.2, 0.6}, {0.8, 0.5}, {9, 0.02}}));
  CHECK(clear.top_norm_ratio == doctest::Approx(10.0 / 1.05));
  CHECK(clear.aligned_are_dominant);

  const NormDomination wrong = norm_domination(record_of({{10, 0.9}, {1, 0.1}, {1, 0.2}, {1, 0.3}}));
  CHECK_FALSE(wrong.aligned_are_dominant);

  CHECK_THROWS_AS(norm_domination(record_of({{1, 0.1}})), Error);

  // One update moves a unit norm by at most eta.
  TrainConfig c(IidSampler{opposite_spec(10, 3, 82)}, Regime::opposite);
  c.steps = 1;
  c.h = 16;
  c.eta = 0.01;
  const TrainResult r = run_training(c);
  const double ratio = norm_domination(r.records.back()).top_norm_ratio;
  CHECK(ratio >= 1.0);
  CHECK(ratio <= (1.0 + c.eta) / (1.0 - c.eta));
}

TEST_CASE("sin theta in the records matches a direct computation") {
  TrainConfig c(IidSampler{opposite_spec(10, 3, 83)}, Regime::opposite);
  c.steps = 5000;
  c.h = 8;
  const TrainResult r = run_training(c);
  const Vector p = sampler_spec(c.sampler).patterns[0].coords();
  const FilterBank& bank = r.final_bank;
  const TrajectoryRecord& last = r.records.back();
  for (Index i = 0; i < bank.h(); ++i) {
    const Vector target = bank.weights[i] * p;
    const double direct = sine_angle(Vector(bank.filters.row(i).transpose()), target);
    CHECK(std::abs(last.filters[static_cast<std::size_t>(i)].sin_theta - direct) <= 1e-10);
  }
  const Series s = sin_theta_series(r.records, 0);
  CHECK(s.t.size() == r.records.size() - 1);
  CHECK(s.t.front() > 0.0);
}

TEST_CASE("statistics helpers") {
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
  auto w = wilson_interval(8, 10);
  CHECK(std::abs(w[0] - 0.49016247153664183) <= 1e-12);
  CHECK(std::abs(w[1] - 0.9433178485456247) <= 1e-12);
  w = wilson_interval(0, 20);
  CHECK(std::abs(w[0]) <= 1e-12);
  CHECK(std::abs(w[1] - 0.16112515805281938) <= 1e-12);
  w = wilson_interval(50, 50);
  CHECK(std::abs(w[0] - 0.9286524008666414) <= 1e-12);
  CHECK(std::abs(w[1] - 1.0) <= 1e-12);
  CHECK_THROWS_AS(wilson_interval(3, 2), Error);

  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(member_seed(5, 0) != member_seed(5, 1));
  CHECK(member_seed(5, 3) == member_seed(5, 3));

  TheoremReport report;
  report.theorem_id = "x";
  report.pass = true;
  report.statistics["n"] = 3;
  report.seed_list = {1, 2};
  const auto j = nlohmann::json::parse(report.to_json());
  CHECK(j.at("theorem_id") == "x");
  CHECK(j.at("pass") == true);
  CHECK(j.at("statistics").at("n") == 3.0);
  CHECK(j.at("seed_list").size() == 2);
}

TEST_CASE("parallel_map keeps results in index order") {
  const auto out = parallel_map<std::size_t>(100, [](std::size_t i) { return i * i; });
  for (std::size_t i = 0; i < 100; ++i) CHECK(out[i] == i * i);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw Error(ErrorCode::io, "boom"); }), Error);
}

TEST_CASE("success_probability_sweep") {
  TrainConfig c(IidSampler{opposite_spec(10, 3, 84)}, Regime::opposite);
  c.steps = 2000;
  c.h = 4;
  SUBCASE("an always-true criterion") {
    const SweepResult r = success_probability_sweep(c, 6, SinThetaBelow{2.0});
    CHECK(r.report.statistics.at("success_fraction") == 1.0);
    CHECK(r.report.pass);
    CHECK(r.seeds.size() == 6);
    CHECK(r.report.seed_list.size() == 6);
  }
  SUBCASE("scheduling does not change the outcome") {
    const SweepResult a = success_probability_sweep(c, 4, AccuracyOne{200});
    const SweepResult b = success_probability_sweep(c, 4, AccuracyOne{200});
    CHECK(a.report.to_json() == b.report.to_json());
  }
  SUBCASE("one filter cannot serve both classes") {
    c.h = 1;
    c.steps = 10000;
    const SweepResult r = success_probability_sweep(c, 20, AccuracyOne{1000});
    CHECK(r.report.statistics.at("success_fraction") <= 0.5 + 3.0 * std::sqrt(0.25 / 20));
  }
  SUBCASE("bad parameters") {
    CHECK_THROWS_AS(success_probability_sweep(c, 0, AccuracyOne{}), Error);
    CHECK_THROWS_AS(success_probability_sweep(c, 2, SinThetaBelow{-1.0}), Error);
    CHECK_THROWS_AS(success_probability_sweep(c, 2, AccuracyOne{0}), Error);
  }
}
