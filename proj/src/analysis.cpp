#include "patterndyn/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace patterndyn {

std::array<double, 2> trailing_window(double t_max, double decades) {
  require(t_max > 0.0 && decades > 0.0, ErrorCode::fit_domain, "window needs t_max > 0 and decades > 0");
  return {t_max / std::pow(10.0, decades), t_max};
}

RateFit fit_power_law(std::span<const double> t, std::span<const double> value, std::array<double, 2> window) {
  require(t.size() == value.size(), ErrorCode::shape_mismatch, "fit_power_law: t and value differ in length");
  require(window[0] > 0.0 && window[1] > window[0], ErrorCode::fit_domain, "fit window must satisfy 0 < lo < hi");
  // A hair of slack so a window built as t_max / 10^1.5 is accepted.
  require(std::log10(window[1] / window[0]) >= kMinFitDecades - 1e-9, ErrorCode::fit_domain,
          "fit window covers less than 1.5 decades");

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window[0] || t[i] > window[1]) continue;
    require(value[i] > 0.0 && std::isfinite(value[i]), ErrorCode::fit_domain,
            "non-positive value inside the fit window");
    lx.push_back(std::log(t[i]));
    ly.push_back(std::log(value[i]));
  }
  require(lx.size() >= kMinFitPoints, ErrorCode::fit_domain, "fewer than 8 points inside the fit window");

  const auto n = static_cast<Index>(lx.size());
  const Eigen::Map<const Vector> x(lx.data(), n), y(ly.data(), n);
  const double mx = x.mean(), my = y.mean();
  const Vector cx = x.array() - mx, cy = y.array() - my;
  const double sxx = cx.squaredNorm();
  require(sxx > 0.0, ErrorCode::fit_domain, "fit window holds a single distinct t");

  RateFit fit;
  fit.exponent = cx.dot(cy) / sxx;
  fit.intercept = my - fit.exponent * mx;
  const double ss_tot = cy.squaredNorm();
  const double ss_res = (cy - fit.exponent * cx).squaredNorm();
  // A constant series leaves only rounding in ss_tot.
  const double flat = 1e-24 * static_cast<double>(n) * std::max(1.0, my * my);
  fit.r_squared = ss_tot > flat ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  fit.fit_window = window;
  fit.n_points = lx.size();
  return fit;
}

Series sin_theta_series(std::span<const TrajectoryRecord> records, std::size_t filter) {
  Series s;
  for (const auto& rec : records) {
    if (rec.step == 0) continue;
    require(filter < rec.filters.size(), ErrorCode::shape_mismatch, "filter index out of range");
    s.t.push_back(static_cast<double>(rec.step));
    s.value.push_back(rec.filters[filter].sin_theta);
  }
  return s;
}

namespace {

struct Tally {
  std::size_t correct = 0;
  std::size_t ties = 0;
  void add(const FilterBank& bank, const LabeledSample& s) {
    const Classification c = classify(s.x, bank);
    if (c.tie) ++ties;
    else if (c.label == s.y) ++correct;
  }
  Accuracy finish(std::size_t n) const {
    return {static_cast<double>(correct) / static_cast<double>(n), static_cast<double>(ties) / static_cast<double>(n), n};
  }
};

void require_probe_dataset(const Dataset& data) {
  require(!data.samples.empty(), ErrorCode::empty_dataset, "dataset is empty");
  require(data.spec.kind == DistKind::clean, ErrorCode::precondition_violated, "probes need a clean dataset");
  require(infer_regime(data.spec) == Regime::opposite, ErrorCode::precondition_violated,
          "probes need p+ = -p-");
}

// Column u of the result: max over slots of <x_slot, probe_u>, one column per sample.
template <typename Fn>
void for_each_response(const Dataset& data, const Matrix& probes, Fn&& fn) {
  for (const auto& s : data.samples) {
    const Matrix r = slots(s.x, data.spec.d).transpose() * probes;
    fn(s, r.colwise().maxCoeff());
  }
}

Matrix stack(const std::vector<Vector>& probes, Index d) {
  Matrix m(d, static_cast<Index>(probes.size()));
  for (std::size_t j = 0; j < probes.size(); ++j) m.col(static_cast<Index>(j)) = probes[j];
  return m;
}

}  // namespace

Accuracy mc_accuracy(const FilterBank& bank, const DistSpec& spec, std::size_t n, Rng& rng) {
  require(n >= 1, ErrorCode::invalid_argument, "mc_accuracy needs n >= 1");
  Tally tally;
  for (std::size_t i = 0; i < n; ++i) tally.add(bank, sample(spec, rng));
  return tally.finish(n);
}

Accuracy dataset_accuracy(const FilterBank& bank, const Dataset& data) {
  require(!data.samples.empty(), ErrorCode::empty_dataset, "dataset is empty");
  Tally tally;
  for (const auto& s : data.samples) tally.add(bank, s);
  return tally.finish(data.samples.size());
}

std::vector<Vector> orthocomplement_probes(const DistSpec& spec, std::size_t n_directions, Rng& rng) {
  require(n_directions >= 1, ErrorCode::invalid_argument, "need at least one probe direction");
  std::vector<Vector> out;
  out.reserve(n_directions);
  for (std::size_t j = 0; j < n_directions; ++j) out.push_back(sample_unit_orthocomplement(spec.patterns, rng).coords());
  return out;
}

MuEstimate estimate_mu(const Dataset& data, std::size_t n_directions, Rng& rng) {
  require_probe_dataset(data);
  const Matrix probes = stack(orthocomplement_probes(data.spec, n_directions, rng), data.spec.d);
  const auto m = static_cast<Index>(n_directions);
  Eigen::VectorXi pos = Eigen::VectorXi::Zero(m), neg = Eigen::VectorXi::Zero(m);
  for_each_response(data, probes, [&](const LabeledSample& s, const auto& f) {
    auto& count = s.y == 1 ? pos : neg;
    for (Index j = 0; j < m; ++j)
      if (f(j) <= 1e-12) ++count[j];
  });
  const double n = static_cast<double>(data.samples.size());
  return {pos.minCoeff() / n, neg.minCoeff() / n, data.samples.size(), n_directions};
}

A2Check check_A2(const Dataset& data, std::size_t n_directions, double epsilon, Rng& rng) {
  require_probe_dataset(data);
  require(epsilon > 0.0, ErrorCode::invalid_argument, "check_A2 needs epsilon > 0");
  const Matrix probes = stack(orthocomplement_probes(data.spec, n_directions, rng), data.spec.d);
  Vector sum = Vector::Zero(static_cast<Index>(n_directions));
  for_each_response(data, probes, [&](const LabeledSample& s, const auto& f) {
    sum += static_cast<double>(s.y) * f.transpose().cwiseMax(0.0);
  });
  A2Check out;
  out.max_abs_mean = sum.cwiseAbs().maxCoeff() / static_cast<double>(data.samples.size());
  out.pass = out.max_abs_mean <= epsilon;
  out.n_directions = n_directions;
  return out;
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorCode::invalid_argument, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

NormDomination norm_domination(const TrajectoryRecord& record) {
  const auto& f = record.filters;
  require(f.size() >= 2, ErrorCode::invalid_argument, "norm_domination needs at least two filters");
  std::vector<double> norms, sines;
  for (const auto& s : f) {
    norms.push_back(s.norm);
    sines.push_back(s.sin_theta);
  }
  const double med_norm = median(norms);
  const double med_sin = median(sines);

  NormDomination out;
  out.top_norm_ratio = *std::max_element(norms.begin(), norms.end()) / med_norm;

  std::vector<std::size_t> order(f.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norms[a] > norms[b]; });
  const std::size_t top = (f.size() + 3) / 4;
  out.aligned_are_dominant = true;
  for (std::size_t j = 0; j < top; ++j)
    if (!(sines[order[j]] < med_sin)) out.aligned_are_dominant = false;
  return out;
}

std::array<double, 2> wilson_interval(std::size_t successes, std::size_t n) {
  require(n >= 1 && successes <= n, ErrorCode::invalid_argument, "wilson_interval needs 0 <= successes <= n, n >= 1");
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::string TheoremReport::to_json() const {
  nlohmann::ordered_json j;
  j["theorem_id"] = theorem_id;
  j["pass"] = pass;
  nlohmann::ordered_json stats = nlohmann::ordered_json::object();
  for (const auto& [name, v] : statistics) stats[name] = v;
  j["statistics"] = stats;
  j["notes"] = notes;
  j["config_digest"] = config_digest;
  j["seed_list"] = seed_list;
  return j.dump(2) + "\n";
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + 16, h, 16);
  std::string s(buf, end);
  return std::string(16 - s.size(), '0') + s;
}

std::uint64_t member_seed(std::uint64_t master, std::size_t i) {
  return Rng(master).substream(stream::sweep).substream(static_cast<std::uint64_t>(i)).key();
}

std::size_t worker_count() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PATTERNDYN_THREADS")) {
    std::size_t cap = 0;
    const std::string_view sv(env);
    auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), cap);
    if (ec == std::errc() && cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

SweepResult success_probability_sweep(const TrainConfig& config, std::size_t n_seeds,
                                      const SuccessCriterion& criterion, double required_fraction,
                                      const std::function<Sampler(std::uint64_t)>& rebuild) {
  require(required_fraction >= 0.0 && required_fraction <= 1.0, ErrorCode::invalid_argument,
          "required success fraction must lie in [0, 1]");
  require(n_seeds >= 1, ErrorCode::invalid_argument, "sweep needs n_seeds >= 1");
  if (const auto* acc = std::get_if<AccuracyOne>(&criterion))
    require(acc->n_test >= 1, ErrorCode::invalid_argument, "accuracy criterion needs n_test >= 1");
  if (const auto* sin = std::get_if<SinThetaBelow>(&criterion))
    require(sin->bound > 0.0 && std::isfinite(sin->bound), ErrorCode::invalid_argument,
            "sin theta criterion needs a positive bound");
  config.validate();

  SweepResult out;
  out.seeds = parallel_map<SeedOutcome>(n_seeds, [&](std::size_t i) {
    TrainConfig c = config;
    c.seed = member_seed(config.seed, i);
    if (rebuild) c.sampler = rebuild(c.seed);
    const TrainResult run = run_training(c);

    SeedOutcome o;
    o.seed = c.seed;
    o.final_record = run.records.back();
    for (const auto& f : o.final_record.filters) o.max_sin_theta = std::max(o.max_sin_theta, f.sin_theta);
    if (const auto* acc = std::get_if<AccuracyOne>(&criterion)) {
      Rng test_rng = Rng(c.seed).substream(stream::test);
      const Accuracy a = mc_accuracy(run.final_bank, sampler_spec(c.sampler), acc->n_test, test_rng);
      o.accuracy = a.accuracy;
      o.tie_fraction = a.tie_fraction;
      o.success = a.accuracy == 1.0;
    } else {
      o.success = o.max_sin_theta < std::get<SinThetaBelow>(criterion).bound;
    }
    return o;
  });

  std::size_t wins = 0;
  TheoremReport& r = out.report;
  r.theorem_id = "sweep";
  for (const auto& o : out.seeds) {
    wins += o.success ? 1 : 0;
    r.seed_list.push_back(o.seed);
  }
  const auto ci = wilson_interval(wins, n_seeds);
  r.statistics["n_seeds"] = static_cast<double>(n_seeds);
  r.statistics["success_count"] = static_cast<double>(wins);
  r.statistics["success_fraction"] = static_cast<double>(wins) / static_cast<double>(n_seeds);
  r.statistics["success_fraction_wilson95_low"] = ci[0];
  r.statistics["success_fraction_wilson95_high"] = ci[1];
  if (const auto* acc = std::get_if<AccuracyOne>(&criterion)) {
    r.statistics["criterion_accuracy_one_n_test"] = static_cast<double>(acc->n_test);
    r.notes.push_back("a seed succeeds when its final bank has accuracy 1 on n_test fresh samples; ties count as errors");
  } else {
    r.statistics["criterion_sin_theta_bound"] = std::get<SinThetaBelow>(criterion).bound;
    r.notes.push_back("a seed succeeds when every filter's final sin theta is below the bound");
  }
  r.statistics["required_fraction"] = required_fraction;
  r.pass = r.statistics["success_fraction"] >= required_fraction;
  return out;
}

}  // namespace patterndyn
