#include "qreset/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "qreset/correlations.hpp"
#include "qreset/errors.hpp"

namespace qreset {

namespace {

constexpr int kMaxTaylorTerms = 40;
constexpr double kTaylorTolerance = 1e-17;
// Largest ||G|| dt handed to a single Taylor sum.
constexpr double kMaxStepNorm = 0.5;
constexpr double kPositivityAbort = 1e-6;

double inf_norm(const Matrix4c& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

template <class Apply>
Matrix4c taylor_exp_action(const Matrix4c& x, double dt, Apply&& apply) {
  Matrix4c sum = x;
  Matrix4c term = x;
  for (int k = 1; k <= kMaxTaylorTerms; ++k) {
    term = apply(term) * (dt / k);
    sum += term;
    if (k >= 2 && term.cwiseAbs().maxCoeff() <= kTaylorTolerance * (1.0 + sum.cwiseAbs().maxCoeff())) {
      break;
    }
  }
  return sum;
}

Matrix4c hermitian_part(const Matrix4c& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

Liouvillian::Liouvillian(const ModelParams& p)
    : params_(p),
      hamiltonian_(static_hamiltonian(p)),
      control_(qreset::control_operator(p)),
      decay_(Matrix4c::Zero()) {
  for (const auto& term : lindblad_ops(p)) {
    if (term.rate == 0.0) continue;
    decay_ += term.rate * term.op.adjoint() * term.op;
    jumps_.push_back(std::sqrt(term.rate) * term.op);
  }
}

// K = -iH - 1/2 sum kappa L^+ L, so that G(rho) = K rho + rho K^+ + sum L rho L^+.
Matrix4c Liouvillian::effective(double field) const {
  return Complex(0.0, -1.0) * (hamiltonian_ + field * control_) - 0.5 * decay_;
}

Matrix4c Liouvillian::apply(const Matrix4c& rho, double field) const {
  const Matrix4c k = effective(field);
  Matrix4c out = k * rho + rho * k.adjoint();
  for (const auto& l : jumps_) out.noalias() += l * rho * l.adjoint();
  return out;
}

Matrix4c Liouvillian::apply_adjoint(const Matrix4c& chi, double field) const {
  const Matrix4c k = effective(field);
  Matrix4c out = k.adjoint() * chi + chi * k;
  for (const auto& l : jumps_) out.noalias() += l.adjoint() * chi * l;
  return out;
}

int Liouvillian::substeps(double field, double dt) const {
  double bound = 2.0 * inf_norm(hamiltonian_ + field * control_) + 2.0 * inf_norm(decay_);
  for (const auto& l : jumps_) bound += inf_norm(l) * inf_norm(l.adjoint());
  return std::max(1, static_cast<int>(std::ceil(bound * std::abs(dt) / kMaxStepNorm)));
}

Matrix4c Liouvillian::step(const Matrix4c& rho, double field, double dt) const {
  const Matrix4c k = effective(field);
  const Matrix4c kd = k.adjoint();
  auto gen = [&](const Matrix4c& x) {
    Matrix4c out = k * x + x * kd;
    for (const auto& l : jumps_) out.noalias() += l * x * l.adjoint();
    return out;
  };
  const int n = substeps(field, dt);
  Matrix4c out = rho;
  for (int s = 0; s < n; ++s) out = taylor_exp_action(out, dt / n, gen);
  return out;
}

Matrix4c Liouvillian::step_adjoint(const Matrix4c& chi, double field, double dt) const {
  const Matrix4c k = effective(field);
  const Matrix4c kd = k.adjoint();
  auto gen = [&](const Matrix4c& x) {
    Matrix4c out = kd * x + x * k;
    for (const auto& l : jumps_) out.noalias() += l.adjoint() * x * l;
    return out;
  };
  const int n = substeps(field, dt);
  Matrix4c out = chi;
  for (int s = 0; s < n; ++s) out = taylor_exp_action(out, dt / n, gen);
  return out;
}

Trajectory propagate(const DensityMatrix& rho0, const ControlField& field, const ModelParams& p,
                     int store_every) {
  if (store_every < 1) throw std::invalid_argument("propagate: store_every must be >= 1");
  p.validate();
  const Liouvillian lv(p);
  const double dt = field.dt();
  const int n = field.n_steps();

  Trajectory traj{{}, {}, p, field};
  const StateTolerance tol{1e-8, 1e-8, kPositivityAbort};
  auto store = [&](int k, const Matrix4c& rho) {
    try {
      traj.states.emplace_back(ComplexMatrix(rho), tol);
    } catch (const InvalidStateError& e) {
      std::ostringstream os;
      os << "propagate: state at t = " << k * dt << " invalid (" << e.what()
         << "); the time step is too large";
      throw NumericalError(os.str());
    }
    traj.times.push_back(k * dt);
  };

  Matrix4c rho = rho0.as4();
  store(0, rho);
  for (int j = 0; j < n; ++j) {
    rho = hermitian_part(lv.step(rho, field[j], dt));
    if ((j + 1) % store_every == 0 || j + 1 == n) store(j + 1, rho);
  }
  return traj;
}

Matrix4c propagate_final(const Matrix4c& rho0, const ControlField& field, const Liouvillian& lv) {
  const double dt = field.dt();
  Matrix4c rho = rho0;
  for (int j = 0; j < field.n_steps(); ++j) rho = hermitian_part(lv.step(rho, field[j], dt));
  return rho;
}

double reset_error(const Matrix4c& rho) { return 1.0 - (rho(0, 0).real() + rho(1, 1).real()); }

double reset_error(const DensityMatrix& rho) { return reset_error(rho.as4()); }

Populations populations(const Trajectory& traj) {
  Populations out;
  out.qubit.reserve(traj.states.size());
  out.tls.reserve(traj.states.size());
  for (const auto& rho : traj.states) {
    out.qubit.push_back(rho(0, 0).real() + rho(1, 1).real());
    out.tls.push_back(rho(0, 0).real() + rho(2, 2).real());
  }
  return out;
}

namespace {

double bloch_volume(const std::array<Matrix4c, 4>& evolved_units) {
  // evolved_units[2 i + j] = propagated |i><j| (x) rho_tls0
  std::array<Matrix2c, 4> qubit_out;
  for (int u = 0; u < 4; ++u) qubit_out[static_cast<std::size_t>(u)] = partial_trace_tls(evolved_units[static_cast<std::size_t>(u)]);
  auto image = [&](const Matrix2c& in) {
    Matrix2c out = Matrix2c::Zero();
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out += in(i, j) * qubit_out[static_cast<std::size_t>(2 * i + j)];
    }
    return out;
  };
  const std::array<Matrix2c, 3> sigma{pauli::x(), pauli::y(), pauli::z()};
  Eigen::Matrix3d m;
  for (int l = 0; l < 3; ++l) {
    const Matrix2c img = image(sigma[static_cast<std::size_t>(l)]);
    for (int k = 0; k < 3; ++k) m(k, l) = 0.5 * (sigma[static_cast<std::size_t>(k)] * img).trace().real();
  }
  return std::abs(m.determinant());
}

}  // namespace

VolumeSeries dynamical_map_volume(const ControlField& field, const ModelParams& p,
                                  const DensityMatrix& rho_tls0, std::span<const double> times) {
  if (rho_tls0.dim() != 2) throw std::invalid_argument("dynamical_map_volume: TLS state must be 2x2");
  p.validate();
  const Liouvillian lv(p);
  const double dt = field.dt();
  const int n = field.n_steps();

  std::vector<int> wanted;
  wanted.reserve(times.size());
  for (double t : times) {
    if (t < -1e-12 || t > field.t_final() + 1e-9) {
      throw std::invalid_argument("dynamical_map_volume: time outside the field grid");
    }
    wanted.push_back(std::clamp(static_cast<int>(std::lround(t / dt)), 0, n));
  }

  std::array<Matrix4c, 4> units;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Matrix2c e = Matrix2c::Zero();
      e(i, j) = 1.0;
      units[static_cast<std::size_t>(2 * i + j)] = tensor_product(e, rho_tls0.matrix());
    }
  }

  VolumeSeries out;
  std::size_t next = 0;
  std::vector<std::size_t> order(wanted.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return wanted[a] < wanted[b]; });
  std::vector<double> volume(wanted.size(), 0.0);
  for (int k = 0; k <= n && next < order.size(); ++k) {
    while (next < order.size() && wanted[order[next]] == k) {
      volume[order[next]] = bloch_volume(units);
      ++next;
    }
    if (k == n) break;
    for (auto& u : units) u = lv.step(u, field[k], dt);
  }
  out.times.assign(times.begin(), times.end());
  out.volume = std::move(volume);
  return out;
}

VolumeSeries dynamical_map_volume(const ControlField& field, const ModelParams& p,
                                  const DensityMatrix& rho_tls0) {
  std::vector<double> times(static_cast<std::size_t>(field.n_steps() + 1));
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = static_cast<double>(k) * field.dt();
  return dynamical_map_volume(field, p, rho_tls0, times);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,pQ,pTLS,purity_Q,epsilon,MI\n";
  const auto pops = populations(traj);
  const double dt = traj.field.dt();
  char line[256];
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const auto& rho = traj.states[i];
    const int k = static_cast<int>(std::lround(traj.times[i] / dt));
    std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", traj.times[i],
                  pops.qubit[i], pops.tls[i], purity(partial_trace_tls(rho)),
                  traj.field.at_grid_point(k), mutual_information(rho));
    os << line;
  }
}

}  // namespace qreset
