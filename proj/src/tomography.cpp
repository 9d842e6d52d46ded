#include "pmfpair/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <deque>
#include <sstream>
#include <tuple>

#include "pmfpair/errors.hpp"
#include "pmfpair/rng.hpp"

namespace pmfpair::tomo {

namespace {

constexpr std::array<char, 6> analysis_labels = {'H', 'V', 'D', 'A', 'L', 'R'};
constexpr double p_floor = 1e-14;

using V16 = Eigen::Matrix<double, 16, 1>;

// Lower-triangular parameter layout: 4 real diagonal entries, then (re, im)
// pairs for (1,0), (2,0), (2,1), (3,0), (3,1), (3,2).
constexpr std::array<std::pair<int, int>, 6> off_diag = {
    {{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}}};

Eigen::Matrix4cd t_from_params(const V16& th) {
  Eigen::Matrix4cd t = Eigen::Matrix4cd::Zero();
  for (int j = 0; j < 4; ++j) {
    t(j, j) = th(j);
  }
  for (int p = 0; p < 6; ++p) {
    t(off_diag[p].first, off_diag[p].second) =
        std::complex<double>(th(4 + 2 * p), th(5 + 2 * p));
  }
  return t;
}

V16 params_from_t(const Eigen::Matrix4cd& t) {
  V16 th;
  for (int j = 0; j < 4; ++j) {
    th(j) = t(j, j).real();
  }
  for (int p = 0; p < 6; ++p) {
    const std::complex<double> v = t(off_diag[p].first, off_diag[p].second);
    th(4 + 2 * p) = v.real();
    th(5 + 2 * p) = v.imag();
  }
  return th;
}

Eigen::Matrix4cd kron22(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd k;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      k.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
  }
  return k;
}

// Orthonormal Hermitian basis G_j = (sigma_mu x sigma_nu)/2, j = 4 mu + nu;
// Tr(G_i G_j) = delta_ij and G_0 = I/2.
std::array<Eigen::Matrix4cd, 16> hermitian_basis() {
  const std::complex<double> i1(0.0, 1.0);
  std::array<Eigen::Matrix2cd, 4> pauli;
  pauli[0] = Eigen::Matrix2cd::Identity();
  pauli[1] << 0, 1, 1, 0;
  pauli[2] << 0, -i1, i1, 0;
  pauli[3] << 1, 0, 0, -1;
  std::array<Eigen::Matrix4cd, 16> basis;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      basis[4 * mu + nu] = 0.5 * kron22(pauli[mu], pauli[nu]);
    }
  }
  return basis;
}

void validate_records(const std::vector<CountRecord>& records) {
  if (records.empty()) {
    throw std::domain_error("tomography: no count records");
  }
  double total = 0.0;
  for (const auto& rec : records) {
    rec.setting.projector_ket();  // throws on bad labels
    if (rec.coincidences < 0) {
      throw std::domain_error("tomography: negative coincidence count in " +
                              rec.setting.label());
    }
    if (!(rec.duration_s > 0.0)) {
      throw std::domain_error("tomography: non-positive duration in " +
                              rec.setting.label());
    }
    total += static_cast<double>(rec.coincidences);
  }
  if (!(total > 0.0)) {
    throw NumericalError("tomography: degenerate count data (all zero)");
  }
}

Eigen::VectorXd duration_weights(const std::vector<CountRecord>& records) {
  Eigen::VectorXd w(records.size());
  const double ref = records.front().duration_s;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    w(k) = records[static_cast<size_t>(k)].duration_s / ref;
  }
  return w;
}

// Nearest physical state: clamp eigenvalues to a small positive floor and
// renormalize the trace.
Eigen::Matrix4cd project_physical(const Eigen::Matrix4cd& h) {
  const Eigen::Matrix4cd sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(sym);
  Eigen::Vector4d vals = es.eigenvalues().cwiseMax(1e-6);
  vals /= vals.sum();
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

// Lower-triangular T with T^dag T = rho, for positive-definite rho: run a
// Cholesky factorization on the index-reversed matrix.
Eigen::Matrix4cd lower_t_from_rho(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd rev = Eigen::Matrix4cd::Zero();
  rev(0, 3) = rev(1, 2) = rev(2, 1) = rev(3, 0) = 1.0;
  const Eigen::Matrix4cd m = rev * rho * rev;
  Eigen::LLT<Eigen::Matrix4cd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NumericalError(
        "mle_reconstruct: Cholesky factorization of the starting state "
        "failed");
  }
  const Eigen::Matrix4cd l = llt.matrixL();
  return (rev * l * rev).adjoint();
}

struct Problem {
  std::vector<quantum::Ket4> kets;
  Eigen::VectorXd counts;
  Eigen::VectorXd weights;
  double n_total = 0.0;
  double penalty = 1.0;

  // Reduced Poisson negative log likelihood (brightness profiled out
  // analytically) plus the scale-fixing penalty (Tr T^dag T - 1)^2, with
  // the analytic gradient in the 16 triangular parameters.
  double eval(const V16& th, V16* grad) const {
    const Eigen::Matrix4cd t = t_from_params(th);
    const double tau = std::max(th.squaredNorm(), 1e-30);
    const size_t n = kets.size();

    std::vector<quantum::Ket4> v(n);
    Eigen::VectorXd p(static_cast<Eigen::Index>(n));
    double s = 0.0;
    for (size_t k = 0; k < n; ++k) {
      v[k] = t * kets[k];
      p(static_cast<Eigen::Index>(k)) =
          std::max(v[k].squaredNorm() / tau, p_floor);
      s += weights(static_cast<Eigen::Index>(k)) *
           p(static_cast<Eigen::Index>(k));
    }
    const double brightness = n_total / s;

    double nll = n_total;  // sum of predicted means after profiling
    for (size_t k = 0; k < n; ++k) {
      const double nk = counts(static_cast<Eigen::Index>(k));
      if (nk > 0.0) {
        nll -= nk * std::log(brightness * weights(static_cast<Eigen::Index>(k)) *
                             p(static_cast<Eigen::Index>(k)));
      }
    }
    const double excess = tau - 1.0;
    const double obj = nll + penalty * excess * excess;
    if (grad == nullptr) {
      return obj;
    }

    // d(nll)/d theta = sum_k alpha_k dq_k - (sum_k alpha_k p_k) dtau with
    // alpha_k = (B w_k - n_k / p_k)/tau, q_k = |T psi_k|^2, tau = |theta|^2.
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    double beta = 0.0;
    for (size_t k = 0; k < n; ++k) {
      const Eigen::Index ki = static_cast<Eigen::Index>(k);
      const double alpha =
          (brightness * weights(ki) - counts(ki) / p(ki)) / tau;
      m += alpha * (v[k].conjugate() * kets[k].transpose());
      beta += alpha * p(ki);
    }
    const double radial = -2.0 * beta + 4.0 * penalty * excess;
    for (int j = 0; j < 4; ++j) {
      (*grad)(j) = 2.0 * m(j, j).real() + radial * th(j);
    }
    for (int q = 0; q < 6; ++q) {
      const auto [a, b] = off_diag[q];
      (*grad)(4 + 2 * q) = 2.0 * m(a, b).real() + radial * th(4 + 2 * q);
      (*grad)(5 + 2 * q) = -2.0 * m(a, b).imag() + radial * th(5 + 2 * q);
    }
    return obj;
  }
};

struct MinimizeResult {
  V16 theta;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Limited-memory BFGS with Armijo backtracking. 16 parameters, so each
// iteration is microseconds; robustness matters more than step-count here.
MinimizeResult lbfgs_minimize(const Problem& prob, const V16& start,
                              int max_iterations, double gradient_tol) {
  V16 th = start;
  V16 g;
  double f = prob.eval(th, &g);
  std::deque<std::tuple<V16, V16, double>> history;  // (s, y, 1/s.y)
  MinimizeResult out;
  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    if (g.norm() <= gradient_tol) {
      out.converged = true;
      break;
    }
    // two-loop recursion for the quasi-Newton direction
    V16 q = g;
    std::vector<double> alpha(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
      const auto& [hs, hy, hrho] = history[static_cast<size_t>(i)];
      alpha[static_cast<size_t>(i)] = hrho * hs.dot(q);
      q -= alpha[static_cast<size_t>(i)] * hy;
    }
    if (!history.empty()) {
      const auto& [hs, hy, hrho] = history.back();
      q *= hs.dot(hy) / hy.squaredNorm();
    }
    for (size_t i = 0; i < history.size(); ++i) {
      const auto& [hs, hy, hrho] = history[i];
      q += (alpha[i] - hrho * hy.dot(q)) * hs;
    }
    V16 d = -q;
    double gd = g.dot(d);
    if (!(gd < 0.0) || !d.allFinite()) {
      d = -g;
      gd = -g.squaredNorm();
      history.clear();
    }

    double step = 1.0;
    bool accepted = false;
    V16 th_new, g_new;
    double f_new = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      th_new = th + step * d;
      f_new = prob.eval(th_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * gd) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      break;  // stuck at numerical resolution; convergence re-checked below
    }
    const V16 sv = th_new - th;
    const V16 yv = g_new - g;
    const double sy = sv.dot(yv);
    if (sy > 1e-12 * sv.norm() * yv.norm()) {
      history.emplace_back(sv, yv, 1.0 / sy);
      if (history.size() > 10) {
        history.pop_front();
      }
    }
    th = th_new;
    f = f_new;
    g = g_new;
  }
  if (g.norm() <= gradient_tol) {
    out.converged = true;
  }
  out.theta = th;
  out.value = f;
  out.iterations = iter;
  return out;
}

}  // namespace

quantum::Ket4 MeasurementSetting::projector_ket() const {
  return quantum::product_ket(quantum::ket_from_label(signal_label),
                              quantum::ket_from_label(idler_label));
}

std::string MeasurementSetting::label() const {
  return std::string{signal_label, idler_label};
}

std::vector<MeasurementSetting> settings_36() {
  std::vector<MeasurementSetting> out;
  out.reserve(36);
  for (char s : analysis_labels) {
    for (char i : analysis_labels) {
      out.push_back(MeasurementSetting{s, i});
    }
  }
  return out;
}

double predict_coincidences(const quantum::TwoQubitState& state,
                            const MeasurementSetting& setting,
                            double brightness) {
  if (!(brightness >= 0.0)) {
    throw std::domain_error("predict_coincidences: brightness must be >= 0");
  }
  return brightness * quantum::fidelity_to_ket(state, setting.projector_ket());
}

std::vector<CountRecord> simulate_counts(const quantum::TwoQubitState& state,
                                         double brightness, std::uint64_t seed,
                                         double duration_s, bool noiseless) {
  if (!(brightness > 0.0)) {
    throw std::domain_error("simulate_counts: brightness must be > 0");
  }
  if (!(duration_s > 0.0)) {
    throw std::domain_error("simulate_counts: duration must be > 0");
  }
  const auto settings = settings_36();
  std::vector<CountRecord> records;
  records.reserve(settings.size());
  for (size_t k = 0; k < settings.size(); ++k) {
    const double mean = predict_coincidences(state, settings[k], brightness);
    CountRecord rec;
    rec.setting = settings[k];
    rec.duration_s = duration_s;
    if (noiseless) {
      rec.coincidences = std::llround(mean);
    } else {
      rng::SplitMix64 gen(rng::derive_stream(seed, rng::stream_counts, k));
      rec.coincidences = rng::poisson(mean, gen);
    }
    records.push_back(rec);
  }
  return records;
}

std::string counts_to_csv(const std::vector<CountRecord>& records) {
  std::ostringstream out;
  out << "signal,idler,coincidences,duration_s\n";
  char buf[64];
  for (const auto& rec : records) {
    std::snprintf(buf, sizeof(buf), "%.9g", rec.duration_s);
    out << rec.setting.signal_label << ',' << rec.setting.idler_label << ','
        << rec.coincidences << ',' << buf << '\n';
  }
  return out.str();
}

std::vector<CountRecord> counts_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("counts CSV: empty input");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  if (line != "signal,idler,coincidences,duration_s") {
    throw ConfigError(
        "counts CSV: expected header 'signal,idler,coincidences,duration_s', "
        "got '" +
        line + "'");
  }
  std::vector<CountRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::array<std::string, 4> fields;
    size_t field = 0;
    size_t start = 0;
    for (size_t j = 0; j <= line.size(); ++j) {
      if (j == line.size() || line[j] == ',') {
        if (field >= 4) {
          throw ConfigError("counts CSV line " + std::to_string(line_no) +
                            ": too many fields");
        }
        fields[field++] = line.substr(start, j - start);
        start = j + 1;
      }
    }
    if (field != 4) {
      throw ConfigError("counts CSV line " + std::to_string(line_no) +
                        ": expected 4 fields");
    }
    if (fields[0].size() != 1 || fields[1].size() != 1) {
      throw ConfigError("counts CSV line " + std::to_string(line_no) +
                        ": polarization labels must be single characters");
    }
    CountRecord rec;
    rec.setting.signal_label = fields[0][0];
    rec.setting.idler_label = fields[1][0];
    try {
      rec.setting.projector_ket();
    } catch (const std::domain_error& e) {
      throw ConfigError("counts CSV line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    try {
      size_t pos = 0;
      rec.coincidences = std::stoll(fields[2], &pos);
      if (pos != fields[2].size()) {
        throw std::invalid_argument("trailing characters");
      }
      pos = 0;
      rec.duration_s = std::stod(fields[3], &pos);
      if (pos != fields[3].size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw ConfigError("counts CSV line " + std::to_string(line_no) +
                        ": malformed number");
    }
    if (rec.coincidences < 0 || !(rec.duration_s > 0.0)) {
      throw ConfigError("counts CSV line " + std::to_string(line_no) +
                        ": counts must be >= 0 and duration > 0");
    }
    records.push_back(rec);
  }
  if (records.empty()) {
    throw ConfigError("counts CSV: no data rows");
  }
  return records;
}

LinearInversionResult linear_inversion(
    const std::vector<CountRecord>& records) {
  validate_records(records);
  const auto basis = hermitian_basis();
  const Eigen::Index n = static_cast<Eigen::Index>(records.size());
  const Eigen::VectorXd w = duration_weights(records);

  double total = 0.0;
  for (const auto& rec : records) {
    total += static_cast<double>(rec.coincidences);
  }
  // every complete analysis basis contributes 4 settings whose
  // probabilities sum to 1, so counts / (records/4) estimates the
  // brightness for grouped designs like settings_36()
  const double brightness = total / (static_cast<double>(n) / 4.0);

  Eigen::MatrixXd design(n, 16);
  Eigen::VectorXd target(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const quantum::Ket4 psi = records[static_cast<size_t>(k)].setting.projector_ket();
    for (int j = 0; j < 16; ++j) {
      design(k, j) = psi.dot(basis[static_cast<size_t>(j)] * psi).real();
    }
    target(k) =
        static_cast<double>(records[static_cast<size_t>(k)].coincidences) /
        (brightness * w(k));
  }

  // Tr rho = 1 fixes the G_0 coefficient at 1/2; solve for the other 15.
  const Eigen::MatrixXd free_design = design.rightCols(15);
  const Eigen::VectorXd rhs = target - 0.5 * design.col(0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(free_design);
  qr.setThreshold(1e-10);
  if (qr.rank() < 15) {
    throw NumericalError(
        "linear_inversion: measurement design is rank deficient (" +
        std::to_string(qr.rank()) + "/15 independent directions)");
  }
  const Eigen::VectorXd x = qr.solve(rhs);

  Eigen::Matrix4cd rho = 0.5 * basis[0];
  for (int j = 0; j < 15; ++j) {
    rho += x(j) * basis[static_cast<size_t>(j + 1)];
  }
  return LinearInversionResult{rho, brightness};
}

TomographyResult mle_reconstruct(const std::vector<CountRecord>& records,
                                 const MleOptions& options) {
  validate_records(records);
  if (options.max_iterations < 1 || options.restarts < 0) {
    throw std::domain_error("mle_reconstruct: invalid optimizer options");
  }

  Problem prob;
  prob.kets.reserve(records.size());
  prob.counts.resize(static_cast<Eigen::Index>(records.size()));
  for (size_t k = 0; k < records.size(); ++k) {
    prob.kets.push_back(records[k].setting.projector_ket());
    prob.counts(static_cast<Eigen::Index>(k)) =
        static_cast<double>(records[k].coincidences);
  }
  prob.weights = duration_weights(records);
  prob.n_total = prob.counts.sum();
  prob.penalty = 1.0 + prob.n_total;
  const double gradient_tol =
      options.gradient_tolerance * (1.0 + prob.n_total);

  const Eigen::Matrix4cd rho0 = project_physical(linear_inversion(records).matrix);
  const V16 th0 = params_from_t(lower_t_from_rho(rho0));

  MinimizeResult best =
      lbfgs_minimize(prob, th0, options.max_iterations, gradient_tol);
  const double rms = std::max(th0.norm() / 4.0, 0.1);
  for (int r = 1; r <= options.restarts; ++r) {
    rng::SplitMix64 gen(rng::derive_stream(options.seed, rng::stream_restart,
                                           static_cast<std::uint64_t>(r)));
    V16 th_r = th0;
    for (int j = 0; j < 16; ++j) {
      th_r(j) += 0.05 * rms * gen.normal();
    }
    const MinimizeResult res =
        lbfgs_minimize(prob, th_r, options.max_iterations, gradient_tol);
    // only adopt a restart on a real improvement, not rounding jitter
    if (res.value < best.value - 1e-9 * (1.0 + std::abs(best.value))) {
      best = res;
    }
  }

  const Eigen::Matrix4cd t = t_from_params(best.theta);
  const Eigen::Matrix4cd a = t.adjoint() * t;
  const double tr = a.trace().real();
  if (!(tr > 0.0)) {
    throw NumericalError("mle_reconstruct: optimizer collapsed to zero trace");
  }

  TomographyResult result{quantum::TwoQubitState::from_matrix(a / tr), 0.0,
                          0.0, best.iterations, best.converged};

  // report the pure likelihood (penalty removed) and the profiled brightness
  double s = 0.0;
  Eigen::VectorXd p(prob.counts.size());
  for (Eigen::Index k = 0; k < prob.counts.size(); ++k) {
    const quantum::Ket4 v = t * prob.kets[static_cast<size_t>(k)];
    p(k) = std::max(v.squaredNorm() / tr, p_floor);
    s += prob.weights(k) * p(k);
  }
  result.brightness = prob.n_total / s;
  double nll = prob.n_total;
  for (Eigen::Index k = 0; k < prob.counts.size(); ++k) {
    if (prob.counts(k) > 0.0) {
      nll -= prob.counts(k) *
             std::log(result.brightness * prob.weights(k) * p(k));
    }
  }
  result.neg_log_likelihood = nll;
  return result;
}

std::vector<ErrorEstimate> bootstrap_errors(
    const std::vector<CountRecord>& records, int n_resamples,
    std::uint64_t seed, const MleOptions& options) {
  validate_records(records);
  if (n_resamples < 2) {
    throw std::domain_error("bootstrap_errors: need at least 2 resamples");
  }

  const quantum::Ket4 phi_plus = quantum::bell_phi_plus_ket();
  std::array<std::vector<double>, 3> samples;
  int skipped = 0;
  for (int r = 0; r < n_resamples; ++r) {
    std::vector<CountRecord> resampled = records;
    for (size_t k = 0; k < resampled.size(); ++k) {
      rng::SplitMix64 gen(rng::derive_stream(
          seed, rng::stream_bootstrap, static_cast<std::uint64_t>(r), k));
      resampled[k].coincidences = rng::poisson(
          static_cast<double>(records[k].coincidences), gen);
    }
    MleOptions opts = options;
    opts.seed = rng::derive_stream(seed, rng::stream_bootstrap_mle,
                                   static_cast<std::uint64_t>(r));
    try {
      const TomographyResult res = mle_reconstruct(resampled, opts);
      if (!res.converged) {
        ++skipped;
        continue;
      }
      samples[0].push_back(quantum::tangle(res.state));
      samples[1].push_back(quantum::linear_entropy(res.state));
      samples[2].push_back(quantum::fidelity_to_ket(res.state, phi_plus));
    } catch (const std::exception&) {
      ++skipped;
    }
  }

  const std::array<const char*, 3> names = {"tangle", "linear_entropy",
                                            "fidelity_phi_plus"};
  std::vector<ErrorEstimate> out;
  for (int m = 0; m < 3; ++m) {
    const auto& xs = samples[static_cast<size_t>(m)];
    if (xs.size() < 2) {
      throw NumericalError(
          "bootstrap_errors: fewer than 2 successful resamples");
    }
    ErrorEstimate est;
    est.metric = names[static_cast<size_t>(m)];
    est.samples = static_cast<int>(xs.size());
    est.skipped = skipped;
    double mean = 0.0;
    for (double x : xs) {
      mean += x;
    }
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) {
      var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(xs.size() - 1);
    est.mean = mean;
    est.stddev = std::sqrt(var);
    out.push_back(est);
  }
  return out;
}

}  // namespace pmfpair::tomo
