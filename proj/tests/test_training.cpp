#include <doctest.h>

#include <cmath>
#include <iostream>
#include <sstream>

#include "patterndyn/csv_io.hpp"
#include "patterndyn/training.hpp"

using namespace patterndyn;

namespace {

DistSpec opposite_spec(Index d, Index k, std::uint64_t seed) {
  Rng rng(seed);
  const UnitVector p = sample_unit_sphere(d, rng);
  return DistSpec::make(DistKind::clean, k, 0.0, PatternBasis({p, -p}));
}

FilterBank one_filter(const Vector& w, double a) {
  return FilterBank::make(Matrix(w.transpose()), Vector::Constant(1, a), Mode::fixed_output);
}

TrainConfig opposite_config(std::size_t steps, std::uint64_t seed) {
  TrainConfig c(IidSampler{opposite_spec(10, 3, 77)}, Regime::opposite);
  c.steps = steps;
  c.h = 8;
  c.eta = 0.01;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("log schedule") {
  const auto lin = LogSchedule::linear(1).steps(10);
  CHECK(lin.size() == 11);
  CHECK(lin.front() == 0);
  CHECK(lin.back() == 10);
  const auto geo = LogSchedule::geometric(2.0).steps(100);
  CHECK(geo == std::vector<std::size_t>{0, 1, 2, 4, 8, 16, 32, 64, 100});
  const std::array<std::size_t, 2> extra{5, 500};
  const auto merged = LogSchedule::linear(4).steps(10, extra);
  CHECK(merged == std::vector<std::size_t>{0, 4, 5, 8, 10});
  CHECK_THROWS_AS(LogSchedule::geometric(1.0).steps(10), Error);
}

TEST_CASE("init_filters") {
  Rng rng(50);
  SUBCASE("unit norms") {
    const FilterBank b = init_filters(16, 7, rng);
    for (Index i = 0; i < 16; ++i) CHECK(std::abs(b.filters.row(i).norm() - 1.0) <= 1e-12);
  }
  SUBCASE("balanced h = 4") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      Rng r(s);
      CHECK((init_filters(4, 3, r, true).weights.array() == 1.0).count() == 2);
    }
  }
  SUBCASE("balanced odd h") {
    try {
      init_filters(5, 3, rng, true);
      FAIL("accepted");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::invalid_config);
    }
  }
  SUBCASE("sign fraction") {
    int pos = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      Rng r(s);
      pos += init_filters(1, 3, r).weights[0] == 1.0;
    }
    CHECK(std::abs(pos / 10000.0 - 0.5) <= 0.02);
  }
}

TEST_CASE("init_filters_joint") {
  Rng rng(51);
  const FilterBank b = init_filters_joint(8, 5, 0.01, rng);
  CHECK(b.mode == Mode::joint);
  for (Index i = 0; i < 8; ++i) {
    CHECK(b.filters.row(i).norm() < 0.01);
    CHECK(b.filters.row(i).norm() > 0.0);
  }
  int pos = 0;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    Rng r(s);
    pos += init_filters_joint(1, 3, 0.01, r).weights[0] > 0.0;
  }
  CHECK(std::abs(pos - 5000.0) <= 4.0 * std::sqrt(10000 * 0.25));

  std::ostringstream captured;
  auto* old = std::cerr.rdbuf(captured.rdbuf());
  const FilterBank big = init_filters_joint(2, 3, 2.0, rng);
  std::cerr.rdbuf(old);
  CHECK(captured.str().find("warning") != std::string::npos);
  CHECK(big.filters.row(0).norm() < 2.0);
}

TEST_CASE("sgd_step_fixed") {
  const DistSpec spec = opposite_spec(10, 3, 52);
  const Vector p = spec.patterns[0].coords();
  const PatternBasis basis({spec.patterns[0]});
  Rng rng(53);

  SUBCASE("no active filter leaves the bank alone") {
    FilterBank bank = FilterBank::make(Matrix::Zero(3, 10), Vector::Ones(3), Mode::fixed_output);
    const auto events = sgd_step_fixed(bank, sample_clean(spec, rng), 0.1);
    CHECK(bank.filters.isZero(0.0));
    for (const auto& ev : events) CHECK_FALSE(ev.fired);
  }
  SUBCASE("positive sample on the key slot moves alpha by eta") {
    Rng perp_rng(54);
    const Vector perp = 0.3 * sample_unit_orthocomplement(spec.patterns, perp_rng).coords();
    FilterBank bank = one_filter(Vector(p + perp), 1.0);
    LabeledSample s = sample_with_label(spec, 1, rng);
    // Make every non-key response non-positive so the key slot wins.
    for (Index u = 0; u < spec.k; ++u)
      if (u != s.key_slots[0] && s.x.segment(u * 10, 10).dot(perp) > 0.0) s.x.segment(u * 10, 10) *= -1.0;
    const auto ev = sgd_step_fixed(bank, s, 0.1);
    CHECK(ev[0].fired);
    CHECK(ev[0].active_slot == s.key_slots[0]);
    const Decomposition dec = decompose(bank.filters.row(0).transpose(), basis);
    CHECK(std::abs(dec.coefficients[0] - 1.1) <= 1e-12);
    CHECK((dec.perp - perp).norm() <= 1e-12);
  }
  SUBCASE("negative sample with the key slot active also raises alpha") {
    FilterBank bank = one_filter(Vector(-p), 1.0);
    const LabeledSample s = sample_with_label(spec, -1, rng);
    const auto ev = sgd_step_fixed(bank, s, 0.1);
    CHECK(ev[0].active_slot == s.key_slots[0]);
    const Decomposition dec = decompose(bank.filters.row(0).transpose(), basis);
    CHECK(std::abs(dec.coefficients[0] - (-0.9)) <= 1e-12);
  }
  SUBCASE("joint banks are refused") {
    FilterBank bank = FilterBank::make(Matrix::Zero(1, 10), Vector::Ones(1), Mode::joint);
    CHECK_THROWS_AS(sgd_step_fixed(bank, sample_clean(spec, rng), 0.1), Error);
  }
  SUBCASE("every step moves a filter by 0 or exactly eta") {
    FilterBank bank = init_filters(8, 10, rng);
    for (int t = 0; t < 2000; ++t) {
      const Matrix before = bank.filters;
      sgd_step_fixed(bank, sample_clean(spec, rng), 0.01);
      for (Index i = 0; i < 8; ++i) {
        const double step = (bank.filters.row(i) - before.row(i)).norm();
        CHECK((step == 0.0 || std::abs(step - 0.01) <= 1e-15));
      }
    }
  }
}

TEST_CASE("single-step statistics from a matched state") {
  const DistSpec spec = opposite_spec(10, 3, 55);
  const PatternBasis basis({spec.patterns[0]});
  Rng state_rng(56);
  const Vector perp = 0.5 * sample_unit_orthocomplement(spec.patterns, state_rng).coords();
  const Vector w0 = 0.4 * spec.patterns[0].coords() + perp;
  const double eta = 0.01;
  constexpr int n = 20000;
  Rng rng(57);
  double sum = 0.0, sum2 = 0.0;
  int alpha_up = 0;
  for (int i = 0; i < n; ++i) {
    FilterBank bank = one_filter(w0, 1.0);
    const LabeledSample s = sample_clean(spec, rng);
    bool non_key_quiet = true;
    for (Index u = 0; u < spec.k; ++u)
      if (u != s.key_slots[0] && s.x.segment(u * 10, 10).dot(w0) > 0.0) non_key_quiet = false;
    const auto ev = sgd_step_fixed(bank, s, eta);
    if (s.y == 1 && non_key_quiet) CHECK(ev[0].active_slot == s.key_slots[0]);
    const Decomposition dec = decompose(bank.filters.row(0).transpose(), basis);
    if (std::abs(dec.coefficients[0] - (0.4 + eta)) <= 1e-12) ++alpha_up;
    const double delta = dec.perp_norm * dec.perp_norm - perp.squaredNorm();
    sum += delta;
    sum2 += delta * delta;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(mean <= eta * eta + 3.0 * se);

  const double freq = static_cast<double>(alpha_up) / n;
  const double sigma = std::sqrt(0.125 * 0.875 / n);
  CHECK(freq >= 0.125 - 3.0 * sigma);
}

TEST_CASE("sgd_step_joint") {
  const DistSpec spec = opposite_spec(6, 3, 58);
  Rng rng(59);
  SUBCASE("silent batch is a no-op") {
    FilterBank bank = FilterBank::make(Matrix::Zero(4, 6), Vector::Constant(4, 0.5), Mode::joint);
    const std::array<LabeledSample, 2> batch{sample_with_label(spec, 1, rng), sample_with_label(spec, -1, rng)};
    sgd_step_joint(bank, batch, 0.1);
    CHECK(bank.filters.isZero(0.0));
    CHECK((bank.weights.array() == 0.5).all());
  }
  SUBCASE("unbalanced batch") {
    FilterBank bank = init_filters_joint(2, 6, 0.01, rng);
    const std::array<LabeledSample, 2> batch{sample_with_label(spec, 1, rng), sample_with_label(spec, 1, rng)};
    try {
      sgd_step_joint(bank, batch, 0.01);
      FAIL("accepted");
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::invalid_batch);
    }
  }
  SUBCASE("per-step motion of a is bounded by the filter norm") {
    for (int trial = 0; trial < 500; ++trial) {
      FilterBank bank = init_filters_joint(4, 6, 0.5, rng);
      const std::array<LabeledSample, 2> batch{sample_with_label(spec, 1, rng), sample_with_label(spec, -1, rng)};
      double f_sum[4] = {0, 0, 0, 0};
      for (const auto& s : batch) {
        const auto r = bank_responses(s.x, bank);
        for (std::size_t i = 0; i < 4; ++i) f_sum[i] += r[i].value;
      }
      const FilterBank before = bank;
      sgd_step_joint(bank, batch, 0.5);
      for (Index i = 0; i < 4; ++i) {
        const double da = std::abs(bank.weights[i] - before.weights[i]);
        CHECK(da <= 0.5 * f_sum[i] + 1e-15);
        CHECK(da <= 2.0 * 0.5 * before.filters.row(i).norm() + 1e-15);
      }
    }
  }
}

TEST_CASE("run_training") {
  SUBCASE("one logged step is the initialization") {
    TrainConfig c = opposite_config(1, 3);
    c.log_schedule = LogSchedule::geometric(1e9);
    const TrainResult r = run_training(c);
    REQUIRE(r.records.size() == 2);
    CHECK(r.records[0].step == 0);
    for (Index i = 0; i < c.h; ++i) {
      const FilterSnapshot& snap = r.records[0].filters[static_cast<std::size_t>(i)];
      CHECK(std::abs(snap.norm - r.initial.filters.row(i).norm()) <= 1e-15);
      CHECK(snap.a == r.initial.weights[i]);
    }
  }
  SUBCASE("same seed, same bytes") {
    const TrainConfig c = opposite_config(2000, 9);
    std::ostringstream a, b;
    write_trajectory_csv(a, run_training(c).records);
    write_trajectory_csv(b, run_training(c).records);
    CHECK(a.str() == b.str());
    TrainConfig other = c;
    other.seed = 10;
    std::ostringstream o;
    write_trajectory_csv(o, run_training(other).records);
    CHECK(o.str() != a.str());
  }
  SUBCASE("norm splits into alpha and perp") {
    const TrainResult r = run_training(opposite_config(3000, 11));
    for (const auto& rec : r.records)
      for (const auto& f : rec.filters)
        CHECK(std::abs(f.norm * f.norm - (f.alpha.squaredNorm() + f.perp_norm * f.perp_norm)) <= 1e-10);
  }
  SUBCASE("alpha is monotone in the sign of a") {
    const TrainResult r = run_training(opposite_config(100000, 12));
    for (std::size_t i = 0; i < 8; ++i) {
      const double a = r.records[0].filters[i].a;
      for (std::size_t j = 1; j < r.records.size(); ++j) {
        const double prev = r.records[j - 1].filters[i].alpha[0];
        const double cur = r.records[j].filters[i].alpha[0];
        if (a > 0) CHECK(cur >= prev - 1e-9);
        else CHECK(cur <= prev + 1e-9);
      }
    }
  }
  SUBCASE("burn-in step is always recorded") {
    TrainConfig c = opposite_config(1000, 13);
    c.burn_in = 333;
    bool seen = false;
    for (const auto& rec : run_training(c).records) seen = seen || rec.step == 333;
    CHECK(seen);
  }
  SUBCASE("config errors") {
    TrainConfig c = opposite_config(10, 1);
    c.eta = 0.0;
    CHECK_THROWS_AS(run_training(c), Error);
    c = opposite_config(10, 1);
    c.h = 3;
    c.balanced = true;
    CHECK_THROWS_AS(run_training(c), Error);
    c = opposite_config(10, 1);
    c.mode = Mode::joint;
    c.balanced = true;
    CHECK_THROWS_AS(run_training(c), Error);
    TrainConfig m(IidSampler{opposite_spec(10, 3, 1)}, Regime::multi);
    CHECK_THROWS_AS(run_training(m), Error);
  }
  SUBCASE("joint mode trains and stays deterministic") {
    TrainConfig c = opposite_config(200, 14);
    c.mode = Mode::joint;
    c.log_schedule = LogSchedule::linear(1);
    const TrainResult a = run_training(c), b = run_training(c);
    CHECK(a.records.size() == 201);
    CHECK(a.final_bank.weights == b.final_bank.weights);
    CHECK(a.final_bank.filters == b.final_bank.filters);
  }
}
