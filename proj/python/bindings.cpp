#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <vector>

#include "pmfpair/config.hpp"
#include "pmfpair/constants.hpp"
#include "pmfpair/dispersion.hpp"
#include "pmfpair/experiment.hpp"
#include "pmfpair/quantum_state.hpp"
#include "pmfpair/source_model.hpp"
#include "pmfpair/tomography.hpp"
#include "pmfpair/visibility.hpp"

namespace py = pybind11;
namespace pf = pmfpair;

namespace {

pf::quantum::TwoQubitState state_from_array(const Eigen::Matrix4cd& rho) {
  return pf::quantum::TwoQubitState::from_matrix(rho);
}

py::dict solution_to_dict(const pf::dispersion::PhaseMatchSolution& s) {
  py::dict d;
  d["pump_omega_rad_s"] = s.omega_pump;
  d["signal_omega_rad_s"] = s.omega_signal;
  d["idler_omega_rad_s"] = s.omega_idler;
  d["signal_wavelength_nm"] = s.signal_wavelength_nm();
  d["idler_wavelength_nm"] = s.idler_wavelength_nm();
  d["detuning_thz"] = s.detuning() / (2.0 * pf::pi) / 1e12;
  d["residual_mismatch_per_m"] = s.residual;
  d["ambiguous"] = s.ambiguous;
  return d;
}

std::vector<pf::tomo::CountRecord> records_from_counts(
    const std::vector<std::int64_t>& counts, double duration_s) {
  const auto settings = pf::tomo::settings_36();
  if (counts.size() != settings.size()) {
    throw std::domain_error("expected exactly 36 counts (settings_36 order)");
  }
  std::vector<pf::tomo::CountRecord> records;
  records.reserve(counts.size());
  for (size_t k = 0; k < counts.size(); ++k) {
    records.push_back(
        pf::tomo::CountRecord{settings[k], counts[k], duration_s});
  }
  return records;
}

py::dict result_to_dict(const pf::tomo::TomographyResult& res) {
  py::dict d;
  d["rho"] = res.state.matrix();
  d["tangle"] = pf::quantum::tangle(res.state);
  d["linear_entropy"] = pf::quantum::linear_entropy(res.state);
  d["fidelity_phi_plus"] =
      pf::quantum::fidelity_to_ket(res.state, pf::quantum::bell_phi_plus_ket());
  d["brightness"] = res.brightness;
  d["nll"] = res.neg_log_likelihood;
  d["iterations"] = res.iterations;
  d["converged"] = res.converged;
  return d;
}

void bind_dispersion(py::module_& m) {
  m.def(
      "refractive_index",
      [](double wavelength_um) {
        return pf::dispersion::SellmeierModel::fused_silica().refractive_index(
            wavelength_um);
      },
      py::arg("wavelength_um"),
      "Fused-silica refractive index (Sellmeier fit, valid 0.21-3.71 um)");
  m.def(
      "phase_mismatch",
      [](double omega_pump, double omega_signal, double omega_idler,
         double birefringence) {
        pf::dispersion::FiberSpec fiber;
        fiber.birefringence = birefringence;
        return pf::dispersion::phase_mismatch(fiber, omega_pump, omega_signal,
                                              omega_idler);
      },
      py::arg("omega_pump"), py::arg("omega_signal"), py::arg("omega_idler"),
      py::arg("birefringence") = 3.5e-4,
      "Four-wave-mixing momentum mismatch in 1/m (angular frequencies)");
  m.def(
      "solve_phase_matching",
      [](double pump_wavelength_nm, double birefringence, double length_m,
         double max_detuning_thz) {
        pf::dispersion::FiberSpec fiber;
        fiber.birefringence = birefringence;
        fiber.length_m = length_m;
        pf::dispersion::SolveOptions options;
        options.max_detuning = 2.0 * pf::pi * max_detuning_thz * 1e12;
        return solution_to_dict(
            pf::dispersion::solve_phase_matching(fiber, pump_wavelength_nm,
                                                 options));
      },
      py::arg("pump_wavelength_nm") = 726.0, py::arg("birefringence") = 3.5e-4,
      py::arg("length_m") = 0.20, py::arg("max_detuning_thz") = 0.0,
      "Signal/idler pair that zeroes the birefringent phase mismatch");
}

void bind_quantum(py::module_& m) {
  m.def(
      "dephased_pair_state",
      [](std::complex<double> overlap, double phase) {
        return pf::quantum::dephased_pair_state(overlap, phase).matrix();
      },
      py::arg("overlap"), py::arg("phase") = 0.0,
      "Partially dephased pair state in the HH,HV,VH,VV basis");
  m.def("bell_phi_plus",
        []() { return pf::quantum::dephased_pair_state(1.0, 0.0).matrix(); });
  m.def(
      "tangle",
      [](const Eigen::Matrix4cd& rho) {
        return pf::quantum::tangle(state_from_array(rho));
      },
      py::arg("rho"), "Wootters tangle (squared concurrence)");
  m.def(
      "linear_entropy",
      [](const Eigen::Matrix4cd& rho) {
        return pf::quantum::linear_entropy(state_from_array(rho));
      },
      py::arg("rho"), "Normalized linear entropy (4/3)(1 - Tr rho^2)");
  m.def(
      "purity",
      [](const Eigen::Matrix4cd& rho) {
        return pf::quantum::purity(state_from_array(rho));
      },
      py::arg("rho"));
  m.def(
      "fidelity_phi_plus",
      [](const Eigen::Matrix4cd& rho) {
        return pf::quantum::fidelity_to_ket(state_from_array(rho),
                                            pf::quantum::bell_phi_plus_ket());
      },
      py::arg("rho"));
}

void bind_source(py::module_& m) {
  m.def(
      "model_overlap",
      [](const std::string& config, const std::vector<double>& delays_fs) {
        const auto cfg = pf::cfg::load_config(config);
        const auto model = pf::experiment::build_model(cfg);
        std::vector<std::complex<double>> out;
        out.reserve(delays_fs.size());
        for (const double fs : delays_fs) {
          pf::source::PathImbalance imbalance = model.imbalance;
          imbalance.compensation_delay_s = pf::fs_to_s(fs);
          out.push_back(pf::source::path_overlap(model.jsa, imbalance));
        }
        return out;
      },
      py::arg("config") = "default", py::arg("delays_fs"),
      "Complex path overlap at each compensation delay (fs)");
  m.def(
      "delay_sweep",
      [](const std::string& config) {
        const auto cfg = pf::cfg::load_config(config);
        const auto model = pf::experiment::build_model(cfg);
        const auto points = pf::source::tangle_delay_sweep(
            model.jsa, model.imbalance, pf::experiment::sweep_delays_s(cfg));
        py::list rows;
        for (const auto& pt : points) {
          py::dict row;
          row["delay_fs"] = pf::s_to_fs(pt.compensation_delay_s);
          row["tangle"] = pt.tangle;
          row["overlap"] = pt.overlap;
          rows.append(row);
        }
        return rows;
      },
      py::arg("config") = "default",
      "Model tangle vs compensation delay for the configured sweep");
  m.def(
      "model_state",
      [](const std::string& config) {
        const auto cfg = pf::cfg::load_config(config);
        const auto model = pf::experiment::build_model(cfg);
        return pf::source::entangled_state(model.jsa, model.imbalance)
            .matrix();
      },
      py::arg("config") = "default",
      "Density matrix of the configured source model");
  m.def(
      "calibrated_pump_fwhm_nm",
      [](const std::string& config) {
        const auto cfg = pf::cfg::load_config(config);
        return pf::experiment::build_model(cfg).pump.spectral_fwhm_nm;
      },
      py::arg("config") = "default",
      "Pump spectral FWHM after the configured calibration (nm)");
}

void bind_tomography(py::module_& m) {
  m.def("settings", []() {
    std::vector<std::string> labels;
    for (const auto& s : pf::tomo::settings_36()) {
      labels.push_back(s.label());
    }
    return labels;
  });
  m.def(
      "born_probabilities",
      [](const Eigen::Matrix4cd& rho) {
        const auto state = state_from_array(rho);
        std::vector<double> p;
        for (const auto& s : pf::tomo::settings_36()) {
          p.push_back(pf::tomo::predict_coincidences(state, s, 1.0));
        }
        return p;
      },
      py::arg("rho"),
      "Born-rule probabilities for the 36 settings (settings() order)");
  m.def(
      "simulate_counts",
      [](const Eigen::Matrix4cd& rho, double brightness, std::uint64_t seed,
         double duration_s, bool noiseless) {
        std::vector<std::int64_t> counts;
        for (const auto& rec : pf::tomo::simulate_counts(
                 state_from_array(rho), brightness, seed, duration_s,
                 noiseless)) {
          counts.push_back(rec.coincidences);
        }
        return counts;
      },
      py::arg("rho"), py::arg("brightness"), py::arg("seed"),
      py::arg("duration_s") = 15.0, py::arg("noiseless") = false,
      "Poisson coincidence counts for the 36 settings");
  m.def(
      "mle_reconstruct",
      [](const std::vector<std::int64_t>& counts, double duration_s,
         std::uint64_t seed, int restarts, int max_iterations,
         double gradient_tolerance) {
        pf::tomo::MleOptions options;
        options.seed = seed;
        options.restarts = restarts;
        options.max_iterations = max_iterations;
        options.gradient_tolerance = gradient_tolerance;
        return result_to_dict(pf::tomo::mle_reconstruct(
            records_from_counts(counts, duration_s), options));
      },
      py::arg("counts"), py::arg("duration_s") = 15.0, py::arg("seed") = 0,
      py::arg("restarts") = 5, py::arg("max_iterations") = 10000,
      py::arg("gradient_tolerance") = 1e-8,
      "Maximum-likelihood state from 36 counts (settings() order)");
  m.def(
      "bootstrap_errors",
      [](const std::vector<std::int64_t>& counts, int resamples,
         std::uint64_t seed, double duration_s) {
        py::dict out;
        for (const auto& est : pf::tomo::bootstrap_errors(
                 records_from_counts(counts, duration_s), resamples, seed)) {
          py::dict e;
          e["mean"] = est.mean;
          e["std"] = est.stddev;
          e["samples"] = est.samples;
          e["skipped"] = est.skipped;
          out[est.metric.c_str()] = e;
        }
        return out;
      },
      py::arg("counts"), py::arg("resamples"), py::arg("seed") = 0,
      py::arg("duration_s") = 15.0,
      "Parametric bootstrap uncertainties of the reconstruction metrics");
}

void bind_visibility(py::module_& m) {
  m.def(
      "visibility",
      [](const Eigen::Matrix4cd& rho, const std::string& basis, int points,
         double brightness) {
        pf::vis::Basis b;
        if (basis == "HV") {
          b = pf::vis::Basis::HV;
        } else if (basis == "DA") {
          b = pf::vis::Basis::DA;
        } else {
          throw std::domain_error("basis must be 'HV' or 'DA'");
        }
        std::vector<double> angles;
        for (int k = 0; k < points; ++k) {
          angles.push_back(pf::pi * k / (points - 1));
        }
        const auto scan = pf::vis::visibility_curve(state_from_array(rho), b,
                                                    angles, brightness);
        py::dict d;
        d["angles_rad"] = scan.angles_rad;
        d["coincidences"] = scan.coincidences;
        d["visibility"] = scan.visibility;
        d["fit_offset"] = scan.fit.offset;
        d["fit_amplitude"] = scan.fit.amplitude;
        d["fit_phase_rad"] = scan.fit.phase;
        return d;
      },
      py::arg("rho"), py::arg("basis"), py::arg("points") = 37,
      py::arg("brightness") = 1.0,
      "Fringe scan and fitted visibility for the HV or DA basis");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Simulation and estimation toolkit for a fiber-based "
      "polarization-entangled photon-pair source";
  m.attr("__version__") = "1.0.0";
  bind_dispersion(m);
  bind_quantum(m);
  bind_source(m);
  bind_tomography(m);
  bind_visibility(m);
}
