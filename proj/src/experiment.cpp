#include "pmfpair/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "pmfpair/constants.hpp"
#include "pmfpair/quantum_state.hpp"
#include "pmfpair/rng.hpp"

namespace pmfpair::experiment {

ModelBundle build_model(const cfg::ExperimentConfig& config) {
  config.validate();

  source::PumpPulse pump;
  pump.center_wavelength_nm = config.pump_center_nm;
  pump.spectral_fwhm_nm = config.pump_fwhm_nm;
  pump.repetition_rate_hz = config.pump_rep_rate_hz;
  pump.average_power_w = config.pump_avg_power_w;

  dispersion::FiberSpec fiber;
  fiber.birefringence = config.fiber_birefringence;
  fiber.length_m = config.fiber_length_m;

  source::GridOptions grid_options;
  grid_options.signal_points = config.grid_signal_points;
  grid_options.idler_points = config.grid_idler_points;
  grid_options.sum_halfwidth_fwhm = config.grid_sum_halfwidth_fwhm;
  grid_options.diff_halfwidth_lobes = config.grid_diff_halfwidth_lobes;

  if (config.calibrate_overlap_sq > 0.0) {
    pump = source::calibrate_pump_fwhm(pump, fiber,
                                       fs_to_s(config.calibrate_tau_fs),
                                       config.calibrate_overlap_sq,
                                       grid_options);
  }

  dispersion::SolveOptions solve_options;
  solve_options.max_detuning = 2.0 * pi * config.max_detuning_thz * 1e12;
  const auto solution = dispersion::solve_phase_matching(
      fiber, pump.center_wavelength_nm, solve_options);

  const auto grid =
      source::FrequencyGrid::around_solution(solution, pump, fiber, grid_options);

  source::PathImbalance imbalance;
  imbalance.intrinsic_delay_s = fs_to_s(config.intrinsic_delay_fs);
  imbalance.compensation_delay_s = fs_to_s(config.compensation_fs);
  imbalance.residual_distinguishability = config.residual_distinguishability;
  imbalance.relative_phase = config.relative_phase_rad;

  return ModelBundle{pump, fiber, solution,
                     source::compute_jsa(pump, fiber, grid), imbalance};
}

std::vector<double> sweep_delays_s(const cfg::ExperimentConfig& config) {
  std::vector<double> delays;
  const double span = config.sweep_stop_fs - config.sweep_start_fs;
  const int n = static_cast<int>(std::floor(span / config.sweep_step_fs + 1e-9)) + 1;
  delays.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    delays.push_back(
        fs_to_s(config.sweep_start_fs + config.sweep_step_fs * j));
  }
  return delays;
}

std::vector<DelayScanRow> run_delay_sweep_experiment(
    const cfg::ExperimentConfig& config, std::uint64_t seed) {
  const ModelBundle model = build_model(config);
  const std::vector<double> delays = sweep_delays_s(config);
  std::vector<DelayScanRow> rows(delays.size());

  const auto run_point = [&](size_t i) {
    source::PathImbalance imbalance = model.imbalance;
    imbalance.compensation_delay_s = delays[i];

    DelayScanRow row;
    row.compensation_s = delays[i];
    row.overlap = source::path_overlap(model.jsa, imbalance);
    const quantum::TwoQubitState state =
        source::entangled_state(model.jsa, imbalance);
    row.model_tangle = quantum::tangle(state);

    const auto counts = tomo::simulate_counts(
        state, config.brightness,
        rng::derive_stream(seed, rng::stream_sweep, i, 0),
        config.acquisition_s, config.noiseless);

    tomo::MleOptions mle_options;
    mle_options.max_iterations = config.mle_max_iterations;
    mle_options.restarts = config.mle_restarts;
    mle_options.gradient_tolerance = config.mle_gradient_tol;
    mle_options.seed = rng::derive_stream(seed, rng::stream_sweep, i, 1);

    const auto recon = tomo::mle_reconstruct(counts, mle_options);
    row.recon_tangle = quantum::tangle(recon.state);
    row.converged = recon.converged;

    if (config.bootstrap_resamples >= 2) {
      const auto errors = tomo::bootstrap_errors(
          counts, config.bootstrap_resamples,
          rng::derive_stream(seed, rng::stream_sweep, i, 2), mle_options);
      row.recon_tangle_sigma = errors.front().stddev;  // tangle comes first
    }
    rows[i] = row;
  };

  if (config.threads <= 1 || delays.size() <= 1) {
    for (size_t i = 0; i < delays.size(); ++i) {
      run_point(i);
    }
    return rows;
  }

  // static interleaved split: row i belongs to worker i % threads; all
  // randomness is keyed by i, so the partition cannot change the numbers
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  const int n_workers =
      std::min<int>(config.threads, static_cast<int>(delays.size()));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<size_t>(n_workers));
  for (int w = 0; w < n_workers; ++w) {
    workers.emplace_back([&, w]() {
      for (size_t i = static_cast<size_t>(w); i < delays.size();
           i += static_cast<size_t>(n_workers)) {
        if (failed.load()) {
          return;
        }
        try {
          run_point(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!failed.exchange(true)) {
            first_error = std::current_exception();
          }
          return;
        }
      }
    });
  }
  for (auto& worker : workers) {
    worker.join();
  }
  if (failed.load()) {
    std::rethrow_exception(first_error);
  }
  return rows;
}

}  // namespace pmfpair::experiment
