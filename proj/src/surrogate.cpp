#include "isac/surrogate.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "isac/rng.hpp"

namespace isac {

double largest_eigenvalue(const MatXc& herm) {
  const Eigen::Index n = herm.rows();
  if (n == 0 || herm.cols() != n)
    throw std::invalid_argument("largest_eigenvalue: square matrix required");
  const double scale = herm.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;

  // Deterministic pseudo-random start avoids accidental orthogonality to the
  // leading eigenvector.
  rng::Substream probe(0x15ac, rng::Stream::Probe, static_cast<std::uint64_t>(n));
  VecXc u(n);
  for (Eigen::Index i = 0; i < n; ++i) u(i) = probe.cgauss(1.0);
  u /= u.norm();

  double rho = 0.0;
  for (int it = 0; it < 500; ++it) {
    VecXc hu = herm * u;
    rho = (u.adjoint() * hu).real()(0, 0);
    const double resid = (hu - rho * u).norm();
    if (resid <= 1e-10 * std::max(std::abs(rho), scale))
      return rho * (1.0 + 1e-12);
    const double norm = hu.norm();
    if (norm == 0.0) break;
    u = hu / norm;
  }

  Eigen::SelfAdjointEigenSolver<MatXc> eig(herm);
  const double lam = eig.eigenvalues().maxCoeff();
  return lam * (1.0 + 1e-12);
}

SurrogateState build_surrogate(const VecXc& x_t, const RadarScene& scene,
                               const SystemConfig& cfg, AdcMode adc) {
  if (x_t.size() != cfg.n_tx)
    throw std::invalid_argument("build_surrogate: x_t has wrong length");
  const RadarWeights wt = radar_weights(cfg, adc);

  SurrogateState s;
  s.anchor = x_t;
  s.mu = wt.mu;
  s.energy = x_t.squaredNorm();

  const MatXc m = whitening_matrix(x_t, scene, cfg, adc);
  Eigen::LLT<MatXc> llt(m);
  const cd a0 = (scene.target.g_tx.transpose() * x_t)(0, 0);
  const VecXc v = llt.solve(a0 * scene.target.g_rx);

  // G_0^H v = conj(g_tx) (g_rx^H v)
  const cd gr_v = (scene.target.g_rx.adjoint() * v)(0, 0);
  s.g_lin = gr_v * scene.target.g_tx.conjugate();

  MatXc mt = MatXc::Zero(cfg.n_tx, cfg.n_tx);
  for (std::size_t q = 0; q < scene.clutter.size(); ++q) {
    const cd gq_v = (scene.clutter[q].g_rx.adjoint() * v)(0, 0);
    const double coef = wt.clutter[q] * std::norm(gq_v);
    if (coef != 0.0) {
      const VecXc c = scene.clutter[q].g_tx.conjugate();
      mt.selfadjointView<Eigen::Lower>().rankUpdate(c, coef);
    }
  }
  s.m_tilde = mt.selfadjointView<Eigen::Lower>();

  s.ell_max = largest_eigenvalue(s.m_tilde);
  s.const1 = -s.mu * v.squaredNorm();

  const VecXc mtx = s.m_tilde * x_t;
  s.w = 2.0 * s.mu * (s.g_lin - mtx + s.ell_max * x_t);
  const double xmx = (x_t.adjoint() * mtx).real()(0, 0);
  s.const2 = s.const1 + s.mu * xmx - 2.0 * s.mu * s.ell_max * s.energy;

  s.anchor_value = s.mu * (v.adjoint() * m * v).real()(0, 0);
  return s;
}

double surrogate_quadratic(const SurrogateState& s, const VecXc& x) {
  const double lin = 2.0 * s.mu * (s.g_lin.adjoint() * x).real()(0, 0);
  const double quad = s.mu * (x.adjoint() * (s.m_tilde * x)).real()(0, 0);
  return lin - quad + s.const1;
}

double surrogate_linear(const SurrogateState& s, const VecXc& x) {
  return (s.w.adjoint() * x).real()(0, 0) + s.const2;
}

}  // namespace isac
