#include "pmfpair/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmfpair/constants.hpp"
#include "pmfpair/errors.hpp"
#include "pmfpair/serialize.hpp"

namespace pmfpair::io {

std::string format_g9(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw NumericalError("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw NumericalError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw NumericalError("rename " + tmp.string() + " -> " + path.string() +
                         " failed: " + ec.message());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pmfpair::io

namespace pmfpair::serialize {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json density_matrix_to_json(const quantum::TwoQubitState& state) {
  ordered_json j;
  j["basis"] = {"HH", "HV", "VH", "VV"};
  ordered_json re = ordered_json::array();
  ordered_json im = ordered_json::array();
  const Eigen::Matrix4cd& rho = state.matrix();
  for (int r = 0; r < 4; ++r) {
    ordered_json re_row = ordered_json::array();
    ordered_json im_row = ordered_json::array();
    for (int c = 0; c < 4; ++c) {
      re_row.push_back(rho(r, c).real());
      im_row.push_back(rho(r, c).imag());
    }
    re.push_back(re_row);
    im.push_back(im_row);
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

quantum::TwoQubitState density_matrix_from_json(const json& j) {
  if (!j.is_object()) {
    throw ConfigError("density matrix JSON: expected an object");
  }
  for (const char* key : {"basis", "re", "im"}) {
    if (!j.contains(key)) {
      throw ConfigError(std::string("density matrix JSON: missing key '") +
                        key + "'");
    }
  }
  const json& basis = j.at("basis");
  const std::array<const char*, 4> expected = {"HH", "HV", "VH", "VV"};
  if (!basis.is_array() || basis.size() != 4) {
    throw ConfigError("density matrix JSON: 'basis' must list 4 labels");
  }
  for (int k = 0; k < 4; ++k) {
    if (!basis[static_cast<size_t>(k)].is_string() ||
        basis[static_cast<size_t>(k)].get<std::string>() != expected[static_cast<size_t>(k)]) {
      throw ConfigError(
          "density matrix JSON: basis must be [\"HH\",\"HV\",\"VH\",\"VV\"]");
    }
  }
  Eigen::Matrix4cd rho;
  for (const char* part : {"re", "im"}) {
    const json& mat = j.at(part);
    if (!mat.is_array() || mat.size() != 4) {
      throw ConfigError(std::string("density matrix JSON: '") + part +
                        "' must be a 4x4 array");
    }
    for (size_t r = 0; r < 4; ++r) {
      const json& row = mat[r];
      if (!row.is_array() || row.size() != 4) {
        throw ConfigError(std::string("density matrix JSON: '") + part +
                          "' must be a 4x4 array");
      }
      for (size_t c = 0; c < 4; ++c) {
        if (!row[c].is_number()) {
          throw ConfigError(std::string("density matrix JSON: '") + part +
                            "' entries must be numbers");
        }
        const double v = row[c].get<double>();
        if (part[0] == 'r') {
          rho(static_cast<int>(r), static_cast<int>(c)) = v;
        } else {
          rho(static_cast<int>(r), static_cast<int>(c)) +=
              std::complex<double>(0.0, v);
        }
      }
    }
  }
  try {
    return quantum::TwoQubitState::from_matrix(rho);
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("density matrix JSON: ") + e.what());
  }
}

ordered_json phase_match_to_json(
    const dispersion::PhaseMatchSolution& solution) {
  ordered_json j;
  j["pump_wavelength_nm"] = omega_to_wavelength_nm(solution.omega_pump);
  j["signal_wavelength_nm"] = solution.signal_wavelength_nm();
  j["idler_wavelength_nm"] = solution.idler_wavelength_nm();
  j["pump_omega_rad_s"] = solution.omega_pump;
  j["signal_omega_rad_s"] = solution.omega_signal;
  j["idler_omega_rad_s"] = solution.omega_idler;
  j["detuning_rad_s"] = solution.detuning();
  j["detuning_thz"] = solution.detuning() / (2.0 * pi) / 1e12;
  j["residual_mismatch_per_m"] = solution.residual;
  j["ambiguous"] = solution.ambiguous;
  return j;
}

ordered_json jsa_to_json(const source::JointSpectralAmplitude& jsa) {
  ordered_json j;
  j["signal_omega_rad_s"] = ordered_json::array();
  j["idler_omega_rad_s"] = ordered_json::array();
  const Eigen::VectorXd& ws = jsa.grid().signal_omegas();
  const Eigen::VectorXd& wi = jsa.grid().idler_omegas();
  for (Eigen::Index a = 0; a < ws.size(); ++a) {
    j["signal_omega_rad_s"].push_back(ws(a));
  }
  for (Eigen::Index b = 0; b < wi.size(); ++b) {
    j["idler_omega_rad_s"].push_back(wi(b));
  }
  j["sum_reference_rad_s"] = jsa.sum_reference();
  ordered_json re = ordered_json::array();
  ordered_json im = ordered_json::array();
  const Eigen::MatrixXcd& amp = jsa.amplitude();
  for (Eigen::Index a = 0; a < amp.rows(); ++a) {
    ordered_json re_row = ordered_json::array();
    ordered_json im_row = ordered_json::array();
    for (Eigen::Index b = 0; b < amp.cols(); ++b) {
      re_row.push_back(amp(a, b).real());
      im_row.push_back(amp(a, b).imag());
    }
    re.push_back(re_row);
    im.push_back(im_row);
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

ordered_json reconstruction_report_to_json(
    const tomo::TomographyResult& result,
    const std::vector<tomo::ErrorEstimate>& errors) {
  ordered_json j = density_matrix_to_json(result.state);
  j["tangle"] = quantum::tangle(result.state);
  j["linear_entropy"] = quantum::linear_entropy(result.state);
  j["fidelity_phi_plus"] =
      quantum::fidelity_to_ket(result.state, quantum::bell_phi_plus_ket());
  j["brightness"] = result.brightness;
  j["nll"] = result.neg_log_likelihood;
  j["iterations"] = result.iterations;
  j["converged"] = result.converged;
  if (!errors.empty()) {
    ordered_json err;
    for (const auto& est : errors) {
      err[est.metric] = {{"mean", est.mean},
                         {"std", est.stddev},
                         {"samples", est.samples},
                         {"skipped", est.skipped}};
    }
    j["errors"] = err;
  }
  return j;
}

}  // namespace pmfpair::serialize
