#include "preth/ed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "preth/errors.hpp"
#include "preth/rng.hpp"

namespace preth {

EvolutionProtocol EvolutionProtocol::piecewise(std::vector<Segment> segments,
                                               double expected_period) {
  if (segments.empty()) throw Error("protocol needs at least one segment");
  double total = 0.0;
  for (const Segment& s : segments) {
    if (s.duration <= 0.0) throw Error("segment durations must be positive");
    total += s.duration;
  }
  if (std::abs(total - expected_period) > 1e-12 * std::max(1.0, total))
    throw Error("segment durations do not sum to the period");
  EvolutionProtocol p;
  p.piecewise_ = true;
  p.segments_ = std::move(segments);
  p.period_ = total;
  return p;
}

EvolutionProtocol EvolutionProtocol::smooth(HarmonicPotential drive,
                                            int steps_per_period, int order,
                                            double tolerance) {
  if (drive.frequency() <= 0.0) throw Error("drive frequency must be positive");
  if (steps_per_period < 1) throw Error("need at least one step per period");
  if (order != 2 && order != 4) throw Error("integrator order must be 2 or 4");
  if (tolerance <= 0.0) throw Error("tolerance must be positive");
  EvolutionProtocol p;
  p.piecewise_ = false;
  p.period_ = drive.period();
  p.drive_ = std::move(drive);
  p.steps_ = steps_per_period;
  p.order_ = order;
  p.tolerance_ = tolerance;
  return p;
}

namespace {

/// One period of a fixed-step exponential integrator. order 2 samples the
/// midpoint; order 4 composes two exponentials built on the two-point
/// Gauss-Legendre nodes (commutator-free fourth-order scheme).
Matrix integrate_period(const std::function<Matrix(double)>& h, double period,
                        int steps, int order, long dim) {
  Matrix u = Matrix::Identity(dim, dim);
  const double dt = period / steps;
  if (order == 2) {
    for (int s = 0; s < steps; ++s) {
      const double mid = (s + 0.5) * dt;
      u = (expm_i_hermitian(h(mid), dt) * u).eval();
    }
    return u;
  }
  const double root = std::sqrt(3.0) / 6.0;
  const double a1 = 0.25 + root;
  const double a2 = 0.25 - root;
  for (int s = 0; s < steps; ++s) {
    const double t0 = s * dt;
    const Matrix h1 = h(t0 + (0.5 - root) * dt);
    const Matrix h2 = h(t0 + (0.5 + root) * dt);
    const Matrix x1 = (a1 * h1 + a2 * h2).eval();
    const Matrix x2 = (a2 * h1 + a1 * h2).eval();
    u = (expm_i_hermitian(x2, dt) * expm_i_hermitian(x1, dt) * u).eval();
  }
  return u;
}

double unitarity_defect(const Matrix& u) {
  const Matrix gram = u.adjoint() * u;
  return (gram - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

/// Restore unitarity by the QR decomposition, keeping the R-diagonal phases
/// so the result stays close to the input.
Matrix reorthonormalize(const Matrix& u) {
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (long i = 0; i < u.cols(); ++i) {
    const Complex d = r(i, i);
    const double mag = std::abs(d);
    q.col(i) *= mag > 0.0 ? d / mag : Complex(1.0, 0.0);
  }
  return q;
}

}  // namespace

Matrix period_propagator(const EvolutionProtocol& protocol,
                         const DenseBudget& budget) {
  Matrix u;
  if (protocol.is_piecewise()) {
    const Lattice& lat = protocol.segments().front().hamiltonian.lattice();
    const long dim = pow_long(lat.local_dim(), lat.sites());
    if (dim > budget.max_dim)
      throw BudgetExceeded("protocol dimension exceeds the dense budget");
    u = Matrix::Identity(dim, dim);
    for (const Segment& seg : protocol.segments())
      u = (expm_i_hermitian(to_dense(seg.hamiltonian, budget), seg.duration) *
           u)
              .eval();
  } else {
    const HarmonicPotential& drive = protocol.drive();
    const Lattice& lat = drive.lattice();
    const long dim = pow_long(lat.local_dim(), lat.sites());
    if (dim > budget.max_dim)
      throw BudgetExceeded("protocol dimension exceeds the dense budget");

    // Dense harmonics once; H(t) is then a cheap Fourier sum.
    std::vector<std::pair<int, Matrix>> modes;
    for (const auto& [k, pk] : drive.harmonics())
      modes.emplace_back(k, to_dense(pk, budget));
    const double nu = drive.frequency();
    const auto h = [&](double t) -> Matrix {
      Matrix out = Matrix::Zero(dim, dim);
      for (const auto& [k, mk] : modes)
        out += std::exp(Complex(0.0, k * nu * t)) * mk;
      return out;
    };

    int steps = protocol.steps_per_period();
    u = integrate_period(h, protocol.period(), steps, protocol.order(), dim);
    bool converged = false;
    for (int round = 0; round < 7; ++round) {
      steps *= 2;
      const Matrix finer =
          integrate_period(h, protocol.period(), steps, protocol.order(), dim);
      const double err = (u - finer).cwiseAbs().maxCoeff();
      u = finer;
      if (err < protocol.tolerance()) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw IntegratorFailure(
          "propagator did not converge under step halving");
  }

  if (unitarity_defect(u) > 1e-10) u = reorthonormalize(u);
  if (unitarity_defect(u) > 1e-10)
    throw Error("propagator lost unitarity beyond repair");
  return u;
}

const std::vector<double>& SimulationTrace::column(
    const std::string& name) const {
  for (const auto& [key, values] : series)
    if (key == name) return values;
  throw Error("trace has no column named " + name);
}

bool SimulationTrace::has_column(const std::string& name) const {
  for (const auto& [key, values] : series)
    if (key == name) return true;
  return false;
}

namespace {

/// Eigen-decompose a unitary via the complex Schur form (diagonal for
/// normal matrices); phases are renormalized to unit modulus.
void unitary_eigensystem(const Matrix& u, Matrix& vectors, Vector& phases) {
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success)
    throw Error("Schur decomposition of the propagator failed");
  vectors = schur.matrixU();
  phases = schur.matrixT().diagonal();
  for (long i = 0; i < phases.size(); ++i) {
    const double mag = std::abs(phases[i]);
    phases[i] = mag > 0.0 ? phases[i] / mag : Complex(1.0, 0.0);
  }
}

/// X = diag(conj(phi)) M diag(phi) - M, the eigenbasis form of
/// U*^n Z U^n - Z; Hermitian whenever M is.
Matrix phase_difference(const Matrix& m, const Vector& phi) {
  const long dim = m.rows();
  Matrix x(dim, dim);
  for (long r = 0; r < dim; ++r)
    for (long c = 0; c < dim; ++c)
      x(r, c) = m(r, c) * (std::conj(phi[r]) * phi[c] - Complex(1.0, 0.0));
  return x;
}

void advance_phases(Vector& phi, const Vector& lambda) {
  for (long i = 0; i < phi.size(); ++i) {
    phi[i] *= lambda[i];
    const double mag = std::abs(phi[i]);
    if (mag > 0.0) phi[i] /= mag;  // keep strictly on the unit circle
  }
}

double hermitian_spectral(const Matrix& x) {
  return is_hermitian(x, 1e-9) ? extremal_eigenvalue(x) : spectral_norm(x);
}

}  // namespace

SimulationTrace heating_diagnostic(const Matrix& u_period,
                                   const Matrix& d_hat, const Matrix& d_bare,
                                   int n_periods, double period, int sites,
                                   const DiagnosticOptions& opts) {
  if (n_periods < 0) throw Error("horizon must be nonnegative");
  if (sites < 1) throw Error("need a positive site count");
  const int stride = std::max(1, opts.stride);

  Matrix w;
  Vector lambda;
  unitary_eigensystem(u_period, w, lambda);
  const Matrix m_hat = (w.adjoint() * d_hat * w).eval();
  const Matrix m_bare = (w.adjoint() * d_bare * w).eval();

  SimulationTrace trace;
  std::vector<double> hat_two, bare_two, hat_sp, bare_sp;
  const auto record = [&](double n, const Vector& phi) {
    trace.times.push_back(n * period);
    const Matrix x_hat = phase_difference(m_hat, phi);
    const Matrix x_bare = phase_difference(m_bare, phi);
    hat_two.push_back(two_norm(x_hat) / sites);
    bare_two.push_back(two_norm(x_bare) / sites);
    if (opts.spectral) {
      hat_sp.push_back(hermitian_spectral(x_hat) / sites);
      bare_sp.push_back(hermitian_spectral(x_bare) / sites);
    }
  };
  if (!opts.sample_periods.empty()) {
    // Direct phase powers: e^{i n theta} is as cheap at n = 10^9 as at 1.
    Eigen::VectorXd theta(lambda.size());
    for (long i = 0; i < lambda.size(); ++i) theta[i] = std::arg(lambda[i]);
    Vector phi(lambda.size());
    for (double n : opts.sample_periods) {
      for (long i = 0; i < lambda.size(); ++i)
        phi[i] = std::exp(Complex(0.0, n * theta[i]));
      record(n, phi);
    }
  } else {
    Vector phi = Vector::Ones(lambda.size());
    for (int n = 0; n <= n_periods; ++n) {
      if (n % stride == 0) record(n, phi);
      if (n < n_periods) advance_phases(phi, lambda);
    }
  }
  trace.series.emplace_back("dhat_two", std::move(hat_two));
  trace.series.emplace_back("bare_two", std::move(bare_two));
  if (opts.spectral) {
    trace.series.emplace_back("dhat_spectral", std::move(hat_sp));
    trace.series.emplace_back("bare_spectral", std::move(bare_sp));
  }
  trace.metadata["normalization"] = "per_site";
  trace.metadata["periods"] = std::to_string(n_periods);
  return trace;
}

SimulationTrace observable_tracking(const Matrix& u_period, const Matrix& d,
                                    const Matrix& observable, int n_periods,
                                    double period,
                                    const DiagnosticOptions& opts) {
  if (n_periods < 0) throw Error("horizon must be nonnegative");
  const int stride = std::max(1, opts.stride);
  const long dim = u_period.rows();

  Matrix w;
  Vector lambda;
  unitary_eigensystem(u_period, w, lambda);
  const Matrix m_drive = (w.adjoint() * observable * w).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(d);
  if (es.info() != Eigen::Success)
    throw Error("eigendecomposition of the effective Hamiltonian failed");
  const Matrix& s = es.eigenvectors();
  const Eigen::VectorXd energies = es.eigenvalues();
  const Matrix m_eff = (s.adjoint() * observable * s).eval();

  SimulationTrace trace;
  std::vector<double> err_two, err_sp;
  Vector phi = Vector::Ones(dim);
  for (int n = 0; n <= n_periods; ++n) {
    if (n % stride == 0) {
      trace.times.push_back(n * period);
      const double t = n * period;
      // Exact evolved observables in their own eigenbases.
      const Matrix evolved =
          w * (m_drive + phase_difference(m_drive, phi)) * w.adjoint();
      // Propagator phases e^{-itE}: conj(psi_r) psi_c then matches the
      // Heisenberg factor e^{+itE_r} e^{-itE_c}.
      Vector psi(dim);
      for (long i = 0; i < dim; ++i)
        psi[i] = std::exp(Complex(0.0, -t * energies[i]));
      const Matrix reference =
          s * (m_eff + phase_difference(m_eff, psi)) * s.adjoint();
      const Matrix diff = evolved - reference;
      err_two.push_back(two_norm(diff));
      if (opts.spectral) err_sp.push_back(hermitian_spectral(diff));
    }
    if (n < n_periods) advance_phases(phi, lambda);
  }
  trace.series.emplace_back("error_two", std::move(err_two));
  if (opts.spectral) trace.series.emplace_back("error_spectral", err_sp);

  // Envelope fit err <= K (t + K')^2 over the recorded points: K' from a
  // small grid, K the tightest constant, scored by the envelope mass.
  const std::vector<double>& err =
      opts.spectral ? trace.column("error_spectral")
                    : trace.column("error_two");
  double best_k = 0.0, best_kp = 0.0, best_score = -1.0;
  for (double kp : {period, 10.0 * period, 100.0 * period,
                    1000.0 * period}) {
    double k = 0.0, mass = 0.0;
    for (size_t i = 0; i < err.size(); ++i) {
      const double shape = (trace.times[i] + kp) * (trace.times[i] + kp);
      k = std::max(k, err[i] / shape);
      mass += shape;
    }
    const double score = k * mass;
    if (best_score < 0.0 || score < best_score) {
      best_score = score;
      best_k = k;
      best_kp = kp;
    }
  }
  std::ostringstream ks, kps;
  ks << best_k;
  kps << best_kp;
  trace.metadata["fit_K"] = ks.str();
  trace.metadata["fit_Kprime"] = kps.str();
  trace.metadata["fit_exponent"] = "2";
  return trace;
}

SimulationTrace static_conservation(const Matrix& g, const Matrix& q,
                                    const std::vector<double>& times,
                                    int n_states, const Lattice& lattice,
                                    std::uint64_t seed) {
  if (n_states < 1) throw Error("need at least one state");
  const long dim = g.rows();
  if (pow_long(lattice.local_dim(), lattice.sites()) != dim)
    throw Error("lattice does not match the dense dimension");

  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  if (es.info() != Eigen::Success)
    throw Error("eigendecomposition of the static Hamiltonian failed");
  const Matrix& s = es.eigenvectors();
  const Eigen::VectorXd energies = es.eigenvalues();

  std::vector<std::vector<double>> drifts(
      times.size(), std::vector<double>(static_cast<size_t>(n_states)));
  Rng base(seed);
  for (int state = 0; state < n_states; ++state) {
    Rng rng = base.split(static_cast<std::uint64_t>(state));
    const Vector psi0 =
        rng.product_state(lattice.sites(), lattice.local_dim());
    const Vector coef = s.adjoint() * psi0;
    const double q0 = std::real(Complex(psi0.dot(q * psi0)));
    for (size_t i = 0; i < times.size(); ++i) {
      Vector evolved(dim);
      for (long j = 0; j < dim; ++j)
        evolved[j] = std::exp(Complex(0.0, -times[i] * energies[j])) * coef[j];
      const Vector psi_t = s * evolved;
      const double qt = std::real(Complex(psi_t.dot(q * psi_t)));
      drifts[i][static_cast<size_t>(state)] = qt - q0;
    }
  }

  SimulationTrace trace;
  std::vector<double> mean(times.size()), var(times.size()),
      abs_mean(times.size());
  for (size_t i = 0; i < times.size(); ++i) {
    double m = 0.0, a = 0.0;
    for (double dft : drifts[i]) {
      m += dft;
      a += std::abs(dft);
    }
    m /= n_states;
    a /= n_states;
    double v = 0.0;
    for (double dft : drifts[i]) v += (dft - m) * (dft - m);
    v /= n_states;
    mean[i] = m;
    var[i] = v;
    abs_mean[i] = a;
  }
  trace.times = times;
  trace.series.emplace_back("drift_mean", std::move(mean));
  trace.series.emplace_back("drift_var", std::move(var));
  trace.series.emplace_back("drift_abs_mean", std::move(abs_mean));
  trace.metadata["seed"] = std::to_string(seed);
  trace.metadata["states"] = std::to_string(n_states);
  return trace;
}

SimulationTrace lr_probe(const Matrix& h, const Matrix& a, const Matrix& b,
                         const std::vector<double>& times) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw Error("eigendecomposition of the Hamiltonian failed");
  const Matrix& s = es.eigenvectors();
  const Eigen::VectorXd energies = es.eigenvalues();
  const Matrix m_b = (s.adjoint() * b * s).eval();
  const long dim = h.rows();

  SimulationTrace trace;
  std::vector<double> norms(times.size());
  for (size_t i = 0; i < times.size(); ++i) {
    Vector psi(dim);
    for (long j = 0; j < dim; ++j)
      psi[j] = std::exp(Complex(0.0, -times[i] * energies[j]));
    const Matrix b_t = s * (m_b + phase_difference(m_b, psi)) * s.adjoint();
    norms[i] = spectral_norm(a * b_t - b_t * a);
  }
  trace.times = times;
  trace.series.emplace_back("commutator_norm", std::move(norms));
  return trace;
}

Matrix dressing_unitary(const RenormTrace& trace, double t,
                        const DenseBudget& budget) {
  if (trace.levels.empty()) throw Error("dressing needs a nonempty trace");
  const Lattice& lat = trace.levels[0].d.lattice();
  const long dim = pow_long(lat.local_dim(), lat.sites());
  if (dim > budget.max_dim)
    throw BudgetExceeded("dressing dimension exceeds the dense budget");
  Matrix y = Matrix::Identity(dim, dim);
  for (int j = 0; j < trace.optimal; ++j) {
    const Potential aj = trace.levels[j].a.value_at(t);
    if (aj.empty()) continue;
    y = (expm_antihermitian(to_dense(aj, budget)) * y).eval();
  }
  return y;
}

Matrix static_dressing_unitary(const RenormTrace& trace,
                               const DenseBudget& budget) {
  if (trace.levels.empty()) throw Error("dressing needs a nonempty trace");
  const Lattice& lat = trace.levels[0].d.lattice();
  const long dim = pow_long(lat.local_dim(), lat.sites());
  if (dim > budget.max_dim)
    throw BudgetExceeded("dressing dimension exceeds the dense budget");
  Matrix y = Matrix::Identity(dim, dim);
  for (int j = 0; j < trace.optimal; ++j) {
    const Potential aj = collapse(trace.levels[j].a);
    if (aj.empty()) continue;
    y = (expm_antihermitian((-to_dense(aj, budget)).eval()) * y).eval();
  }
  return y;
}

}  // namespace preth
