#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "pmfpair/config.hpp"
#include "pmfpair/constants.hpp"
#include "pmfpair/errors.hpp"
#include "pmfpair/experiment.hpp"
#include "pmfpair/io.hpp"
#include "pmfpair/quantum_state.hpp"
#include "pmfpair/rng.hpp"
#include "pmfpair/serialize.hpp"
#include "pmfpair/source_model.hpp"
#include "pmfpair/tomography.hpp"
#include "pmfpair/visibility.hpp"

namespace {

namespace pf = pmfpair;
using nlohmann::ordered_json;
using pf::io::format_g9;

constexpr const char* version_string = "pmfpair 1.0.0 (config schema 1)";

struct CommonArgs {
  std::string config = "default";
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config,
                  "Config file path, or 'default' for built-in defaults")
      ->capture_default_str();
  sub->add_option("--seed", args.seed,
                  "Seed for every stochastic step of this command")
      ->capture_default_str();
  sub->add_option("--out", args.out,
                  "Output file (written atomically); stdout when omitted");
  sub->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

std::string pick_format(const CommonArgs& args, const char* fallback) {
  return args.format.empty() ? fallback : args.format;
}

void emit(const CommonArgs& args, const std::string& content) {
  if (args.out.empty()) {
    std::cout << content;
  } else {
    pf::io::atomic_write_text(args.out, content);
  }
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<double> fringe_angles(int points) {
  std::vector<double> angles;
  angles.reserve(static_cast<size_t>(points));
  for (int k = 0; k < points; ++k) {
    angles.push_back(pf::pi * static_cast<double>(k) /
                     static_cast<double>(points - 1));
  }
  return angles;
}

// ---------------------------------------------------------------- commands

void run_phasematch(const CommonArgs& args) {
  const auto config = pf::cfg::load_config(args.config);
  pf::dispersion::FiberSpec fiber;
  fiber.birefringence = config.fiber_birefringence;
  fiber.length_m = config.fiber_length_m;
  pf::dispersion::SolveOptions options;
  options.max_detuning = 2.0 * pf::pi * config.max_detuning_thz * 1e12;
  const auto solution = pf::dispersion::solve_phase_matching(
      fiber, config.pump_center_nm, options);
  const ordered_json j = pf::serialize::phase_match_to_json(solution);

  if (pick_format(args, "json") == "json") {
    emit(args, json_text(j));
    return;
  }
  std::ostringstream csv;
  std::ostringstream header;
  std::ostringstream row;
  bool first = true;
  for (const auto& [key, value] : j.items()) {
    header << (first ? "" : ",") << key;
    if (value.is_boolean()) {
      row << (first ? "" : ",") << (value.get<bool>() ? "true" : "false");
    } else {
      row << (first ? "" : ",") << format_g9(value.get<double>());
    }
    first = false;
  }
  csv << header.str() << '\n' << row.str() << '\n';
  emit(args, csv.str());
}

void run_jsa(const CommonArgs& args) {
  const auto config = pf::cfg::load_config(args.config);
  const auto model = pf::experiment::build_model(config);

  if (pick_format(args, "json") == "json") {
    ordered_json j;
    j["pump_fwhm_nm"] = model.pump.spectral_fwhm_nm;
    j.update(pf::serialize::jsa_to_json(model.jsa));
    emit(args, json_text(j));
    return;
  }
  const auto& grid = model.jsa.grid();
  const auto& amp = model.jsa.amplitude();
  std::ostringstream csv;
  csv << "signal_omega_rad_s,idler_omega_rad_s,re,im\n";
  for (Eigen::Index a = 0; a < amp.rows(); ++a) {
    for (Eigen::Index b = 0; b < amp.cols(); ++b) {
      csv << format_g9(grid.signal_omegas()(a)) << ','
          << format_g9(grid.idler_omegas()(b)) << ','
          << format_g9(amp(a, b).real()) << ',' << format_g9(amp(a, b).imag())
          << '\n';
    }
  }
  emit(args, csv.str());
}

void run_delay_sweep(const CommonArgs& args) {
  const auto config = pf::cfg::load_config(args.config);
  const auto model = pf::experiment::build_model(config);
  const auto delays = pf::experiment::sweep_delays_s(config);
  const auto points =
      pf::source::tangle_delay_sweep(model.jsa, model.imbalance, delays);

  if (pick_format(args, "csv") == "csv") {
    std::ostringstream csv;
    csv << "delay_fs,tangle,overlap_abs,overlap_phase_rad\n";
    for (const auto& pt : points) {
      csv << format_g9(pf::s_to_fs(pt.compensation_delay_s)) << ','
          << format_g9(pt.tangle) << ',' << format_g9(std::abs(pt.overlap))
          << ',' << format_g9(std::arg(pt.overlap)) << '\n';
    }
    emit(args, csv.str());
    return;
  }
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const auto& pt : points) {
    j["rows"].push_back({{"delay_fs", pf::s_to_fs(pt.compensation_delay_s)},
                         {"tangle", pt.tangle},
                         {"overlap_abs", std::abs(pt.overlap)},
                         {"overlap_phase_rad", std::arg(pt.overlap)}});
  }
  emit(args, json_text(j));
}

void run_tomo_simulate(const CommonArgs& args) {
  const auto config = pf::cfg::load_config(args.config);
  const auto model = pf::experiment::build_model(config);
  const auto state = pf::source::entangled_state(model.jsa, model.imbalance);
  const auto records =
      pf::tomo::simulate_counts(state, config.brightness, args.seed,
                                config.acquisition_s, config.noiseless);

  if (pick_format(args, "csv") == "csv") {
    emit(args, pf::tomo::counts_to_csv(records));
    return;
  }
  ordered_json j;
  j["records"] = ordered_json::array();
  for (const auto& rec : records) {
    j["records"].push_back(
        {{"signal", std::string(1, rec.setting.signal_label)},
         {"idler", std::string(1, rec.setting.idler_label)},
         {"coincidences", rec.coincidences},
         {"duration_s", rec.duration_s}});
  }
  emit(args, json_text(j));
}

pf::tomo::MleOptions mle_options_from(const pf::cfg::ExperimentConfig& config,
                                      std::uint64_t seed) {
  pf::tomo::MleOptions options;
  options.max_iterations = config.mle_max_iterations;
  options.restarts = config.mle_restarts;
  options.gradient_tolerance = config.mle_gradient_tol;
  options.seed = seed;
  return options;
}

std::string reconstruction_csv(const ordered_json& report) {
  std::ostringstream csv;
  csv << "key,value\n";
  for (const char* key :
       {"tangle", "linear_entropy", "fidelity_phi_plus", "brightness", "nll"}) {
    csv << key << ',' << format_g9(report.at(key).get<double>()) << '\n';
  }
  csv << "iterations," << report.at("iterations").get<int>() << '\n';
  csv << "converged," << (report.at("converged").get<bool>() ? "true" : "false")
      << '\n';
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      csv << "rho_" << r << c << "_re,"
          << format_g9(report.at("re")[r][c].get<double>()) << '\n';
      csv << "rho_" << r << c << "_im,"
          << format_g9(report.at("im")[r][c].get<double>()) << '\n';
    }
  }
  if (report.contains("errors")) {
    for (const auto& [metric, est] : report.at("errors").items()) {
      csv << metric << "_mean," << format_g9(est.at("mean").get<double>())
          << '\n';
      csv << metric << "_std," << format_g9(est.at("std").get<double>())
          << '\n';
      csv << metric << "_samples," << est.at("samples").get<int>() << '\n';
      csv << metric << "_skipped," << est.at("skipped").get<int>() << '\n';
    }
  }
  return csv.str();
}

void run_tomo_reconstruct(const CommonArgs& args,
                          const std::string& counts_path) {
  const auto config = pf::cfg::load_config(args.config);
  const auto records =
      pf::tomo::counts_from_csv(pf::io::read_text_file(counts_path));
  const auto result =
      pf::tomo::mle_reconstruct(records, mle_options_from(config, args.seed));
  std::vector<pf::tomo::ErrorEstimate> errors;
  if (config.bootstrap_resamples >= 2) {
    errors = pf::tomo::bootstrap_errors(records, config.bootstrap_resamples,
                                        args.seed,
                                        mle_options_from(config, args.seed));
  }
  const ordered_json report =
      pf::serialize::reconstruction_report_to_json(result, errors);
  if (pick_format(args, "json") == "json") {
    emit(args, json_text(report));
  } else {
    emit(args, reconstruction_csv(report));
  }
}

ordered_json scan_to_json(const pf::vis::VisibilityScan& scan) {
  ordered_json j;
  j["angles_rad"] = scan.angles_rad;
  j["coincidences"] = scan.coincidences;
  j["fit"] = {{"offset", scan.fit.offset},
              {"amplitude", scan.fit.amplitude},
              {"phase_rad", scan.fit.phase},
              {"max_residual", scan.fit.max_residual}};
  j["visibility"] = scan.visibility;
  return j;
}

double fit_value(const pf::vis::FringeFit& fit, double angle) {
  return fit.offset + fit.amplitude * std::cos(2.0 * angle + fit.phase);
}

void append_scan_csv(std::ostringstream& csv, const char* basis,
                     const pf::vis::VisibilityScan& scan) {
  for (size_t k = 0; k < scan.angles_rad.size(); ++k) {
    csv << basis << ',' << format_g9(scan.angles_rad[k]) << ','
        << format_g9(scan.coincidences[k]) << ','
        << format_g9(fit_value(scan.fit, scan.angles_rad[k])) << ','
        << format_g9(scan.visibility) << '\n';
  }
}

void run_visibility(const CommonArgs& args, const std::string& rho_path) {
  const auto config = pf::cfg::load_config(args.config);
  pf::quantum::TwoQubitState state = [&]() {
    if (!rho_path.empty()) {
      return pf::serialize::density_matrix_from_json(
          nlohmann::json::parse(pf::io::read_text_file(rho_path), nullptr,
                                true, true));
    }
    const auto model = pf::experiment::build_model(config);
    return pf::source::entangled_state(model.jsa, model.imbalance);
  }();

  const auto angles = fringe_angles(config.visibility_points);
  const auto hv = pf::vis::visibility_curve(state, pf::vis::Basis::HV, angles,
                                            config.brightness);
  const auto da = pf::vis::visibility_curve(state, pf::vis::Basis::DA, angles,
                                            config.brightness);

  if (pick_format(args, "csv") == "csv") {
    std::ostringstream csv;
    csv << "basis,angle_rad,coincidences,fit_coincidences,visibility\n";
    append_scan_csv(csv, "HV", hv);
    append_scan_csv(csv, "DA", da);
    emit(args, csv.str());
    return;
  }
  ordered_json j;
  j["brightness"] = config.brightness;
  j["hv"] = scan_to_json(hv);
  j["da"] = scan_to_json(da);
  emit(args, json_text(j));
}

void run_full_experiment(const CommonArgs& args) {
  if (args.out.empty()) {
    throw pf::ConfigError("full-experiment requires --out <directory>");
  }
  const auto config = pf::cfg::load_config(args.config);
  const std::filesystem::path dir(args.out);
  std::filesystem::create_directories(dir);

  const auto model = pf::experiment::build_model(config);
  const auto rows = pf::experiment::run_delay_sweep_experiment(config, args.seed);

  // sweep artifact
  std::ostringstream sweep_csv;
  sweep_csv << "delay_fs,model_tangle,recon_tangle,recon_tangle_sigma,converged\n";
  size_t best = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    sweep_csv << format_g9(pf::s_to_fs(row.compensation_s)) << ','
              << format_g9(row.model_tangle) << ','
              << format_g9(row.recon_tangle) << ','
              << format_g9(row.recon_tangle_sigma) << ','
              << (row.converged ? "true" : "false") << '\n';
    if (row.model_tangle > rows[best].model_tangle) {
      best = i;
    }
  }
  pf::io::atomic_write_text(dir / "sweep.csv", sweep_csv.str());

  // full characterization at the best compensation of the scan
  pf::source::PathImbalance imbalance = model.imbalance;
  imbalance.compensation_delay_s = rows[best].compensation_s;
  const auto state = pf::source::entangled_state(model.jsa, imbalance);
  const auto counts = pf::tomo::simulate_counts(
      state, config.brightness,
      pf::rng::derive_stream(args.seed, pf::rng::stream_state, 0),
      config.acquisition_s, config.noiseless);
  pf::io::atomic_write_text(dir / "counts.csv", pf::tomo::counts_to_csv(counts));

  const auto mle_options = mle_options_from(
      config, pf::rng::derive_stream(args.seed, pf::rng::stream_state, 1));
  const auto recon = pf::tomo::mle_reconstruct(counts, mle_options);
  std::vector<pf::tomo::ErrorEstimate> errors;
  if (config.bootstrap_resamples >= 2) {
    errors = pf::tomo::bootstrap_errors(
        counts, config.bootstrap_resamples,
        pf::rng::derive_stream(args.seed, pf::rng::stream_state, 2),
        mle_options);
  }
  const ordered_json report =
      pf::serialize::reconstruction_report_to_json(recon, errors);
  pf::io::atomic_write_text(dir / "rho.json", json_text(report));

  // predicted fringes of the reconstructed state
  const auto angles = fringe_angles(config.visibility_points);
  const auto hv = pf::vis::visibility_curve(recon.state, pf::vis::Basis::HV,
                                            angles, config.brightness);
  const auto da = pf::vis::visibility_curve(recon.state, pf::vis::Basis::DA,
                                            angles, config.brightness);
  const auto write_scan = [&](const char* name,
                              const pf::vis::VisibilityScan& scan) {
    std::ostringstream csv;
    csv << "angle_rad,coincidences,fit_coincidences\n";
    for (size_t k = 0; k < scan.angles_rad.size(); ++k) {
      csv << format_g9(scan.angles_rad[k]) << ','
          << format_g9(scan.coincidences[k]) << ','
          << format_g9(fit_value(scan.fit, scan.angles_rad[k])) << '\n';
    }
    pf::io::atomic_write_text(dir / name, csv.str());
  };
  write_scan("visibility_hv.csv", hv);
  write_scan("visibility_da.csv", da);

  pf::io::atomic_write_text(dir / "phasematch.json",
                            json_text(pf::serialize::phase_match_to_json(
                                model.solution)));
  pf::io::atomic_write_text(dir / "config.txt",
                            pf::cfg::config_to_text(config));

  ordered_json summary;
  summary["tool"] = version_string;
  summary["seed"] = args.seed;
  summary["pump_fwhm_nm_used"] = model.pump.spectral_fwhm_nm;
  summary["calibrated"] = config.calibrate_overlap_sq > 0.0;
  summary["phase_matching"] = pf::serialize::phase_match_to_json(model.solution);
  summary["sweep"] = {
      {"points", rows.size()},
      {"best_compensation_fs", pf::s_to_fs(rows[best].compensation_s)},
      {"peak_model_tangle", rows[best].model_tangle},
      {"peak_recon_tangle", rows[best].recon_tangle}};
  ordered_json recon_summary = {
      {"tangle", report.at("tangle")},
      {"linear_entropy", report.at("linear_entropy")},
      {"fidelity_phi_plus", report.at("fidelity_phi_plus")},
      {"brightness", report.at("brightness")},
      {"nll", report.at("nll")},
      {"converged", report.at("converged")}};
  if (report.contains("errors")) {
    recon_summary["errors"] = report.at("errors");
  }
  summary["reconstruction"] = recon_summary;
  summary["visibility"] = {{"hv", hv.visibility}, {"da", da.visibility}};
  summary["files"] = {"sweep.csv",          "counts.csv",
                      "rho.json",           "visibility_hv.csv",
                      "visibility_da.csv",  "phasematch.json",
                      "config.txt",         "summary.json"};
  pf::io::atomic_write_text(dir / "summary.json", json_text(summary));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Simulation and estimation toolkit for a fiber-based "
      "polarization-entangled photon-pair source"};
  app.set_version_flag("--version", version_string);
  app.require_subcommand(1);

  CommonArgs phasematch_args, jsa_args, sweep_args, simulate_args,
      reconstruct_args, visibility_args, full_args;
  std::string counts_path, rho_path;

  auto* phasematch = app.add_subcommand(
      "phasematch", "Solve the birefringent phase-matching condition");
  add_common(phasematch, phasematch_args);
  phasematch->callback([&]() { run_phasematch(phasematch_args); });

  auto* jsa = app.add_subcommand(
      "jsa", "Evaluate the joint spectral amplitude on the quadrature grid");
  add_common(jsa, jsa_args);
  jsa->callback([&]() { run_jsa(jsa_args); });

  auto* sweep = app.add_subcommand(
      "delay-sweep", "Model tangle vs compensation delay curve");
  add_common(sweep, sweep_args);
  sweep->callback([&]() { run_delay_sweep(sweep_args); });

  auto* simulate = app.add_subcommand(
      "tomo-simulate", "Simulate coincidence counts for all 36 settings");
  add_common(simulate, simulate_args);
  simulate->callback([&]() { run_tomo_simulate(simulate_args); });

  auto* reconstruct = app.add_subcommand(
      "tomo-reconstruct",
      "Maximum-likelihood density matrix from a counts CSV");
  add_common(reconstruct, reconstruct_args);
  reconstruct->add_option("--counts", counts_path, "Counts CSV file")
      ->required();
  reconstruct->callback(
      [&]() { run_tomo_reconstruct(reconstruct_args, counts_path); });

  auto* visibility = app.add_subcommand(
      "visibility", "Polarization fringe scans and fitted visibilities");
  add_common(visibility, visibility_args);
  visibility->add_option(
      "--rho", rho_path,
      "Density matrix JSON (defaults to the configured model state)");
  visibility->callback([&]() { run_visibility(visibility_args, rho_path); });

  auto* full = app.add_subcommand(
      "full-experiment",
      "Delay sweep with per-delay tomography plus full characterization at "
      "the optimum; writes a directory of artifacts");
  add_common(full, full_args);
  full->callback([&]() { run_full_experiment(full_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const pf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const pf::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
