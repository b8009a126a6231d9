#include "precedence/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "parallel.hpp"
#include "precedence/error.hpp"

namespace precedence::experiments {
namespace {

double upper_tail(double statistic, std::size_t dof) {
  if (dof == 0) return 1.0;
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(dof));
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

void require_probability_vector(std::span<const double> p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::invalid_argument, std::string(what) + ": entries must be finite and nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::invalid_argument, std::string(what) + ": entries must sum to 1");
}

ledger::PreparationKey study_prep_key() {
  return ledger::PreparationKey{ledger::Digest::of("permutation-study/preparation")};
}

ledger::MeasurementKey study_meas_key() {
  return ledger::MeasurementKey{ledger::Digest::of("permutation-study/measurement")};
}

std::vector<std::uint64_t> draw_next_outcomes(std::span<const std::uint64_t> counts, std::size_t n_outcomes,
                                              std::uint64_t n_draws, Rng rng) {
  std::vector<std::uint64_t> hist(n_outcomes, 0);
  for (std::uint64_t i = 0; i < n_draws; ++i) ++hist[static_cast<std::size_t>(dynamics::sample_precedent(counts, rng))];
  return hist;
}

}  // namespace

double tv_distance(std::span<const double> h1, std::span<const double> h2) {
  if (h1.size() != h2.size())
    throw Error(ErrorCode::dimension_mismatch, "tv_distance: vectors have different lengths");
  require_probability_vector(h1, "tv_distance");
  require_probability_vector(h2, "tv_distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < h1.size(); ++i) acc += std::abs(h1[i] - h2[i]);
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

std::vector<double> normalize(std::span<const std::uint64_t> counts) {
  const std::uint64_t total = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (total == 0) throw Error(ErrorCode::invalid_argument, "normalize: all counts are zero");
  std::vector<double> out;
  out.reserve(counts.size());
  for (std::uint64_t c : counts) out.push_back(static_cast<double>(c) / static_cast<double>(total));
  return out;
}

ChiSquare chi_square_gof(std::span<const std::uint64_t> observed, std::span<const double> expected) {
  if (observed.size() != expected.size())
    throw Error(ErrorCode::dimension_mismatch, "chi_square_gof: length mismatch");
  const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
  if (n == 0.0) throw Error(ErrorCode::invalid_argument, "chi_square_gof: no observations");
  ChiSquare out;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = expected[i] * n;
    if (e <= 0.0) {
      if (observed[i] != 0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
      }
      continue;
    }
    ++cells;
    const double d = static_cast<double>(observed[i]) - e;
    out.statistic += d * d / e;
  }
  out.dof = cells > 0 ? cells - 1 : 0;
  if (std::isfinite(out.statistic)) out.p_value = upper_tail(out.statistic, out.dof);
  return out;
}

ChiSquare chi_square_homogeneity(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::dimension_mismatch, "chi_square_homogeneity: length mismatch");
  const double na = static_cast<double>(std::accumulate(a.begin(), a.end(), std::uint64_t{0}));
  const double nb = static_cast<double>(std::accumulate(b.begin(), b.end(), std::uint64_t{0}));
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::invalid_argument, "chi_square_homogeneity: empty sample");
  const double total = na + nb;
  ChiSquare out;
  std::size_t columns = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0.0) continue;
    ++columns;
    const double ea = na * col / total;
    const double eb = nb * col / total;
    const double da = static_cast<double>(a[i]) - ea;
    const double db = static_cast<double>(b[i]) - eb;
    out.statistic += da * da / ea + db * db / eb;
  }
  out.dof = columns > 0 ? columns - 1 : 0;
  out.p_value = upper_tail(out.statistic, out.dof);
  return out;
}

void SlitModel::validate() const {
  if (envelope.empty()) throw Error(ErrorCode::invalid_argument, "slit model: no bins");
  if (phase_1.size() != envelope.size() || phase_2.size() != envelope.size())
    throw Error(ErrorCode::invalid_argument, "slit model: per-bin vectors differ in length");
  for (double e : envelope)
    if (!(e >= 0.0) || !std::isfinite(e)) throw Error(ErrorCode::invalid_argument, "slit model: bad envelope weight");
  if (!(weight_1 >= 0.0) || !(weight_2 >= 0.0))
    throw Error(ErrorCode::invalid_argument, "slit model: path weights must be nonnegative");
}

std::vector<double> SlitModel::probabilities() const {
  validate();
  std::vector<double> p(n_bins());
  for (std::size_t j = 0; j < n_bins(); ++j) {
    const qcore::Complex a = weight_1 * std::polar(1.0, phase_1[j]) + weight_2 * std::polar(1.0, phase_2[j]);
    p[j] = envelope[j] * std::norm(a);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::invalid_argument, "slit model: screen is dark");
  for (double& v : p) v /= total;
  return p;
}

qcore::PureState SlitModel::two_path_state() const {
  validate();
  qcore::Vector amp(static_cast<Eigen::Index>(n_bins()));
  for (std::size_t j = 0; j < n_bins(); ++j)
    amp(static_cast<Eigen::Index>(j)) =
        std::sqrt(envelope[j]) * (weight_1 * std::polar(1.0, phase_1[j]) + weight_2 * std::polar(1.0, phase_2[j]));
  return qcore::PureState::make(amp);
}

SlitModel far_field_model(const FarFieldParams& params) {
  if (params.n_bins < 2) throw Error(ErrorCode::invalid_argument, "far field: need at least 2 bins");
  if (!(params.wavelength > 0.0) || !(params.slit_separation > 0.0) || !(params.screen_distance > 0.0) ||
      !(params.screen_half_width > 0.0) || !(params.slit_width >= 0.0))
    throw Error(ErrorCode::invalid_argument, "far field: lengths must be positive");
  SlitModel m;
  const std::size_t n = params.n_bins;
  m.phase_1.resize(n);
  m.phase_2.resize(n);
  m.envelope.resize(n);
  const double L = params.screen_distance;
  const double s = 0.5 * params.slit_separation;
  const double k = 2.0 * std::numbers::pi / params.wavelength;
  for (std::size_t j = 0; j < n; ++j) {
    // Bin centers, symmetric about the screen center.
    const double x = params.screen_half_width * (2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(n) - 1.0);
    const double r1 = std::hypot(L, x - s);
    const double r2 = std::hypot(L, x + s);
    m.phase_1[j] = k * (r1 - L);
    m.phase_2[j] = k * (r2 - L);
    const double beta = std::numbers::pi * params.slit_width * x / (params.wavelength * L);
    const double sinc = beta == 0.0 ? 1.0 : std::sin(beta) / beta;
    m.envelope[j] = sinc * sinc;
  }
  return m;
}

SlitModel block_second_path(SlitModel model) {
  model.weight_2 = 0.0;
  return model;
}

DoubleSlitResult run_double_slit(const SlitModel& model, std::uint64_t n_photons, const dynamics::PolicyConfig& policy,
                                 Rng& rng, ledger::Ledger& ledger) {
  if (n_photons < 1) throw Error(ErrorCode::invalid_argument, "run_double_slit: n_photons must be >= 1");
  const auto spec = ledger::spec_for_pure_state(model.two_path_state());
  const auto povm = qcore::Povm::computational_basis(model.n_bins());
  auto stream = dynamics::run_stream(spec, povm, policy, n_photons, rng, ledger);
  DoubleSlitResult out;
  out.sequence = std::move(stream.outcomes);
  out.histogram = std::move(stream.histogram);
  out.probabilities = model.probabilities();
  out.regime_counts = stream.regime_counts;
  return out;
}

PermutationReport permutation_study(std::span<const std::int32_t> sequence, std::size_t n_perms, Rng& rng,
                                    std::uint64_t n_draws) {
  if (sequence.size() < 2) throw Error(ErrorCode::invalid_argument, "permutation_study: need at least 2 outcomes");
  if (n_perms < 1) throw Error(ErrorCode::invalid_argument, "permutation_study: need at least 1 permutation");
  if (n_draws < 1) throw Error(ErrorCode::invalid_argument, "permutation_study: need at least 1 draw");
  const std::int32_t max_outcome = *std::max_element(sequence.begin(), sequence.end());
  if (*std::min_element(sequence.begin(), sequence.end()) < 0)
    throw Error(ErrorCode::invalid_argument, "permutation_study: negative outcome");
  const auto n_outcomes = static_cast<std::size_t>(max_outcome) + 1;
  const auto prep = study_prep_key();
  const auto meas = study_meas_key();

  // Orderings: index 0 is the original, the rest are Fisher-Yates shuffles
  // drawn sequentially from `rng`.
  std::vector<std::vector<std::int32_t>> orders;
  orders.emplace_back(sequence.begin(), sequence.end());
  for (std::size_t k = 0; k < n_perms; ++k) {
    std::vector<std::int32_t> perm(sequence.begin(), sequence.end());
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
    orders.push_back(std::move(perm));
  }
  const std::uint64_t master = rng.next_u64();

  std::vector<std::vector<std::uint64_t>> counts(orders.size());
  std::vector<std::vector<std::uint64_t>> draws(orders.size());
  std::vector<std::vector<std::uint64_t>> common(orders.size());
  detail::parallel_for(orders.size(), [&](std::uint64_t k) {
    ledger::Ledger ledger([] { return std::int64_t{0}; });
    for (std::int32_t o : orders[k]) ledger.record(prep, meas, o, n_outcomes);
    counts[k] = ledger.counts(prep, meas);
    counts[k].resize(n_outcomes, 0);
    draws[k] = draw_next_outcomes(counts[k], n_outcomes, n_draws, Rng::for_stream(master, k + 1));
    common[k] = draw_next_outcomes(counts[k], n_outcomes, n_draws, Rng::for_stream(master, 0));
  });

  PermutationReport report;
  report.identical_under_common_seed = true;
  report.all_pass = true;
  for (std::size_t k = 0; k < orders.size(); ++k) {
    report.next_outcome_distributions.push_back(normalize(counts[k]));
    report.identical_under_common_seed = report.identical_under_common_seed && common[k] == common[0];
    if (k == 0) continue;
    const ChiSquare test = chi_square_homogeneity(draws[0], draws[k]);
    const double corrected = std::min(1.0, test.p_value * static_cast<double>(n_perms));
    report.p_values.push_back(test.p_value);
    report.corrected_p_values.push_back(corrected);
    report.all_pass = report.all_pass && corrected > report.alpha;
  }
  return report;
}

LockInReport lock_in_study(std::uint64_t n_runs, const dynamics::PolicyConfig& policy, std::uint64_t run_length,
                           const ledger::PreparationSpec& spec, const qcore::Povm& povm, Rng& rng) {
  if (n_runs < 1) throw Error(ErrorCode::invalid_argument, "lock_in_study: n_runs must be >= 1");
  if (run_length < 1) throw Error(ErrorCode::invalid_argument, "lock_in_study: run_length must be >= 1");
  policy.validate();
  const std::uint64_t master = rng.next_u64();
  std::vector<std::uint8_t> locked(n_runs, 0);
  detail::parallel_for(n_runs, [&](std::uint64_t run) {
    Rng run_rng = Rng::for_stream(master, run);
    const auto stream = dynamics::run_stream(spec, povm, policy, run_length, run_rng);
    const std::int32_t first = stream.outcomes.front();
    locked[run] = std::all_of(stream.outcomes.begin(), stream.outcomes.end(),
                              [first](std::int32_t o) { return o == first; });
  });
  LockInReport report;
  report.n_runs = n_runs;
  report.locked_runs = static_cast<std::uint64_t>(std::count(locked.begin(), locked.end(), 1));
  report.locked_fraction = static_cast<double>(report.locked_runs) / static_cast<double>(n_runs);
  return report;
}

void prefill_exact(ledger::Ledger& ledger, const dynamics::MeasurementContext& ctx, std::uint64_t total) {
  const auto& p = ctx.born();
  std::vector<std::uint64_t> quota(p.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::uint64_t assigned = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double exact = p[k] * static_cast<double>(total);
    quota[k] = static_cast<std::uint64_t>(std::floor(exact));
    assigned += quota[k];
    remainders.emplace_back(exact - std::floor(exact), k);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total && i < remainders.size(); ++i, ++assigned) ++quota[remainders[i].second];
  for (std::size_t k = 0; k < quota.size(); ++k)
    for (std::uint64_t i = 0; i < quota[k]; ++i)
      ledger.record(ctx.prep_key(), ctx.meas_key(), static_cast<std::int32_t>(k), ctx.n_outcomes());
}

void prefill_sampled(ledger::Ledger& ledger, const dynamics::MeasurementContext& ctx, std::uint64_t count, Rng& rng) {
  for (std::uint64_t i = 0; i < count; ++i)
    ledger.record(ctx.prep_key(), ctx.meas_key(), static_cast<std::int32_t>(rng.categorical(ctx.born())),
                  ctx.n_outcomes());
}

ConvergenceReport convergence_study(const ledger::PreparationSpec& spec, const qcore::Povm& povm,
                                    const dynamics::PolicyConfig& policy, std::uint64_t n_steps,
                                    std::span<const std::uint64_t> checkpoints, Rng& rng, ledger::Ledger& ledger) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw Error(ErrorCode::invalid_argument, "convergence_study: checkpoints must be strictly increasing");
    if (checkpoints[i] > n_steps)
      throw Error(ErrorCode::invalid_argument, "convergence_study: checkpoint beyond n_steps");
  }
  policy.validate();
  const dynamics::MeasurementContext ctx(spec, povm, policy.key_mode);
  dynamics::FreedomSource freedom(policy.freedom);
  ConvergenceReport report;
  report.born = ctx.born();

  std::optional<dynamics::Regime> last;
  auto record_checkpoint = [&](std::uint64_t step) {
    std::vector<std::uint64_t> counts = ledger.counts(ctx.prep_key(), ctx.meas_key());
    counts.resize(ctx.n_outcomes(), 0);
    if (std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}) == 0)
      throw Error(ErrorCode::invalid_argument, "convergence_study: checkpoint 0 on an empty stream");
    const auto empirical = normalize(counts);
    // Born vectors are clamped, so renormalize before comparing.
    auto born = report.born;
    const double s = std::accumulate(born.begin(), born.end(), 0.0);
    for (double& b : born) b /= s;
    report.steps.push_back(step);
    report.tv_distance.push_back(tv_distance(empirical, born));
    report.regimes.push_back(last);
  };

  std::size_t next = 0;
  if (next < checkpoints.size() && checkpoints[next] == 0) {
    record_checkpoint(0);
    ++next;
  }
  report.outcomes.reserve(n_steps);
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    const auto r = dynamics::measure(ctx, ledger, policy, freedom, rng);
    report.outcomes.push_back(r.outcome);
    last = r.regime;
    if (r.regime == dynamics::Regime::buildup && !report.first_buildup_step) report.first_buildup_step = step;
    if (r.regime == dynamics::Regime::precedence && !report.first_precedence_step) report.first_precedence_step = step;
    while (next < checkpoints.size() && checkpoints[next] == step + 1) {
      record_checkpoint(step + 1);
      ++next;
    }
  }
  return report;
}

}  // namespace precedence::experiments
