#include "precedence/study.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "precedence/error.hpp"
#include "precedence/freedom_count.hpp"
#include "precedence/random_states.hpp"

namespace precedence::study {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ledger::PreparationSpec spec_for(const config::Amplitudes& amplitudes) {
  qcore::Vector v(static_cast<Eigen::Index>(amplitudes.size()));
  for (std::size_t i = 0; i < amplitudes.size(); ++i) v(static_cast<Eigen::Index>(i)) = amplitudes[i];
  return ledger::spec_for_pure_state(qcore::PureState::make(v));
}

/// Running TV distance of a finished stream at `n_points` evenly spaced steps.
std::string stream_series_csv(std::span<const std::int32_t> outcomes, std::span<const dynamics::Regime> regimes,
                              std::span<const double> born, std::size_t n_points) {
  std::ostringstream os;
  os << "step,tv_distance,regime\n";
  std::vector<std::uint64_t> counts(born.size(), 0);
  const std::uint64_t n = outcomes.size();
  std::size_t mark = 0;  // next mark is max(1, n * mark / n_points)
  for (std::uint64_t i = 0; i < n; ++i) {
    ++counts[static_cast<std::size_t>(outcomes[i])];
    const std::uint64_t step = i + 1;
    if (step < std::max<std::uint64_t>(1, n * mark / n_points)) continue;
    const auto empirical = experiments::normalize(counts);
    os << step << "," << fmt(experiments::tv_distance(empirical, born)) << "," << dynamics::to_string(regimes[i]) << "\n";
    while (mark <= n_points && std::max<std::uint64_t>(1, n * mark / n_points) <= step) ++mark;
  }
  return os.str();
}

std::vector<double> renormalized(std::vector<double> p) {
  double s = 0.0;
  for (double v : p) s += v;
  for (double& v : p) v /= s;
  return p;
}

struct LedgerHandling {
  ledger::Ledger ledger;
  fs::path path;
  std::string reported;
};

LedgerHandling open_ledger(const config::RunConfig& config, const fs::path& output_dir) {
  LedgerHandling h;
  if (config.ledger_path) {
    h.path = *config.ledger_path;
    h.reported = *config.ledger_path;
    if (fs::exists(h.path)) h.ledger = ledger::load_ledger(h.path);
  } else {
    h.path = output_dir / "ledger.jsonl";
    h.reported = "ledger.jsonl";
  }
  return h;
}

json run_double_slit(const config::RunConfig& config, Rng& rng, const fs::path& out, std::string& ledger_file) {
  const auto& p = config.double_slit;
  auto model = experiments::far_field_model(p.screen);
  if (p.block_second_path) model = experiments::block_second_path(model);
  auto lh = open_ledger(config, out);
  const auto spec = ledger::spec_for_pure_state(model.two_path_state());
  const auto povm = qcore::Povm::computational_basis(model.n_bins());
  const auto stream = dynamics::run_stream(spec, povm, config.policy, p.n_photons, rng, lh.ledger);
  const auto analytic = model.probabilities();
  const double tv = experiments::tv_distance(experiments::normalize(stream.histogram), analytic);

  write_file_atomic(out / "series.csv", stream_series_csv(stream.outcomes, stream.regimes, analytic, 100));
  std::ostringstream hist;
  hist << "bin,count,probability\n";
  for (std::size_t j = 0; j < analytic.size(); ++j) hist << j << "," << stream.histogram[j] << "," << fmt(analytic[j]) << "\n";
  write_file_atomic(out / "histogram.csv", hist.str());
  ledger::save_ledger(lh.ledger, lh.path);
  ledger_file = lh.reported;

  return {{"n_photons", p.n_photons},
          {"n_bins", model.n_bins()},
          {"tv_distance", tv},
          {"regime_counts",
           {{"freedom", stream.regime_counts.freedom},
            {"buildup", stream.regime_counts.buildup},
            {"precedence", stream.regime_counts.precedence}}},
          {"histogram", stream.histogram}};
}

json run_convergence(const config::RunConfig& config, Rng& rng, const fs::path& out, std::string& ledger_file) {
  const auto& p = config.convergence;
  const auto spec = spec_for(p.state);
  const auto povm = qcore::Povm::computational_basis(p.state.size());
  auto lh = open_ledger(config, out);
  const dynamics::MeasurementContext ctx(spec, povm, config.policy.key_mode);
  if (p.prefill == config::Prefill::exact) experiments::prefill_exact(lh.ledger, ctx, p.prefill_count);
  if (p.prefill == config::Prefill::sampled) experiments::prefill_sampled(lh.ledger, ctx, p.prefill_count, rng);
  const auto report = experiments::convergence_study(spec, povm, config.policy, p.n_steps, p.checkpoints, rng, lh.ledger);

  std::ostringstream csv;
  csv << "step,tv_distance,regime\n";
  for (std::size_t i = 0; i < report.steps.size(); ++i)
    csv << report.steps[i] << "," << fmt(report.tv_distance[i]) << ","
        << (report.regimes[i] ? dynamics::to_string(*report.regimes[i]) : "prefill") << "\n";
  write_file_atomic(out / "series.csv", csv.str());
  ledger::save_ledger(lh.ledger, lh.path);
  ledger_file = lh.reported;

  json boundaries = json::object();
  boundaries["first_buildup_step"] = report.first_buildup_step ? json(*report.first_buildup_step) : json(nullptr);
  boundaries["first_precedence_step"] =
      report.first_precedence_step ? json(*report.first_precedence_step) : json(nullptr);
  json summary{{"n_steps", p.n_steps},
               {"born", renormalized(report.born)},
               {"checkpoints", report.steps},
               {"tv_distance", report.tv_distance},
               {"final_tv_distance", report.tv_distance.back()},
               {"regime_boundaries", boundaries}};
  if (config.policy.buildup == dynamics::Buildup::simplest_rule)
    summary["continuation"] = "deterministic continuation for constant/periodic rules, sampled for iid";
  return summary;
}

json run_lock_in(const config::RunConfig& config, Rng& rng, const fs::path& out) {
  const auto& p = config.lock_in;
  const auto spec = spec_for(p.state);
  const auto povm = qcore::Povm::computational_basis(p.state.size());
  const auto report = experiments::lock_in_study(p.n_runs, config.policy, p.run_length, spec, povm, rng);
  std::ostringstream csv;
  csv << "n_runs,locked_runs,locked_fraction\n" << report.n_runs << "," << report.locked_runs << ","
      << fmt(report.locked_fraction) << "\n";
  write_file_atomic(out / "series.csv", csv.str());
  return {{"n_runs", report.n_runs},
          {"run_length", p.run_length},
          {"locked_runs", report.locked_runs},
          {"locked_fraction", report.locked_fraction}};
}

json run_permutation(const config::RunConfig& config, Rng& rng, const fs::path& out) {
  const auto& p = config.permutation;
  std::vector<std::int32_t> sequence = p.sequence;
  if (sequence.empty())
    for (std::uint64_t i = 0; i < p.sequence_length; ++i)
      sequence.push_back(static_cast<std::int32_t>(rng.uniform_index(p.n_outcomes)));
  const auto report = experiments::permutation_study(sequence, p.n_perms, rng, p.n_draws);
  std::ostringstream csv;
  csv << "permutation,p_value,corrected_p_value\n";
  for (std::size_t k = 0; k < report.p_values.size(); ++k)
    csv << (k + 1) << "," << fmt(report.p_values[k]) << "," << fmt(report.corrected_p_values[k]) << "\n";
  write_file_atomic(out / "series.csv", csv.str());
  return {{"sequence_length", sequence.size()},
          {"n_perms", p.n_perms},
          {"n_draws", p.n_draws},
          {"p_values", report.p_values},
          {"corrected_p_values", report.corrected_p_values},
          {"alpha", report.alpha},
          {"identical_under_common_seed", report.identical_under_common_seed},
          {"all_pass", report.all_pass}};
}

json run_postulates(const config::RunConfig& config, const fs::path& out) {
  json report = freedom::postulate_report(config.postulates.max_n);
  std::ostringstream csv;
  csv << "capacity,k_quantum,k_classical\n";
  for (const auto& row : report["degrees_of_freedom"])
    csv << row["capacity"].get<std::size_t>() << "," << row["quantum"].get<std::size_t>() << ","
        << row["classical"].get<std::size_t>() << "\n";
  write_file_atomic(out / "series.csv", csv.str());
  return report;
}

json run_tomography(const config::RunConfig& config, Rng& rng, const fs::path& out) {
  const auto& p = config.tomography;
  std::ostringstream csv;
  csv << "dim,index,max_abs_error,min_eigenvalue\n";
  json per_dim = json::array();
  bool all_valid = true;
  for (std::uint64_t n : p.dims) {
    const auto mset = freedom::informationally_complete_povm(n);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < p.n_states; ++k) {
      const auto rho = qcore::random_density_matrix(n, rng);
      auto stats = freedom::measurement_statistics(rho, mset);
      if (p.noise > 0.0)
        for (auto& row : stats)
          for (double& v : row) v += p.noise * (2.0 * rng.uniform01() - 1.0);
      const auto back = freedom::reconstruct_state(stats, mset);
      const double err = (back.matrix() - rho.matrix()).cwiseAbs().maxCoeff();
      const double min_eig = back.eigenvalues().minCoeff();
      all_valid = all_valid && min_eig >= -qcore::kStructuralTol;
      worst = std::max(worst, err);
      csv << n << "," << k << "," << fmt(err) << "," << fmt(min_eig) << "\n";
    }
    per_dim.push_back({{"dim", n}, {"max_abs_error", worst}});
  }
  write_file_atomic(out / "series.csv", csv.str());
  return {{"n_states", p.n_states}, {"noise", p.noise}, {"per_dim", per_dim}, {"all_valid", all_valid}};
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::io, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot rename into '" + path.string() + "': " + ec.message());
}

json run_study(const config::RunConfig& config, const fs::path& output_dir) {
  if (!config.seed) throw Error(ErrorCode::config, "run_study: seed must be resolved before running");
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory '" + output_dir.string() + "': " + ec.message());

  const json echo = config::to_json(config);
  write_file_atomic(output_dir / "config_echo.json", echo.dump(2) + "\n");

  Rng rng(*config.seed);
  std::string ledger_file;
  json results;
  switch (config.study) {
    case config::StudyKind::double_slit: results = run_double_slit(config, rng, output_dir, ledger_file); break;
    case config::StudyKind::convergence: results = run_convergence(config, rng, output_dir, ledger_file); break;
    case config::StudyKind::lock_in: results = run_lock_in(config, rng, output_dir); break;
    case config::StudyKind::permutation: results = run_permutation(config, rng, output_dir); break;
    case config::StudyKind::postulates: results = run_postulates(config, output_dir); break;
    case config::StudyKind::tomography: results = run_tomography(config, rng, output_dir); break;
  }

  json summary{{"study", config::to_string(config.study)},
               {"seed", *config.seed},
               {"config", echo},
               {"results", results},
               {"ledger_file", ledger_file.empty() ? json(nullptr) : json(ledger_file)}};
  write_file_atomic(output_dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace precedence::study
