#include "isac/comm.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/model.hpp"

namespace isac {

namespace {

void check_sizes(const MatXc& h, const VecXc& s,
                 const std::vector<double>& gammas,
                 const std::vector<double>& noise_powers) {
  const auto u = static_cast<std::size_t>(h.rows());
  if (static_cast<std::size_t>(s.size()) != u ||
      gammas.size() != u || noise_powers.size() != u)
    throw std::invalid_argument(
        "constraint builder: per-user arrays must match channel rows");
  for (std::size_t i = 0; i < u; ++i) {
    if (!(gammas[i] >= 0.0))
      throw std::invalid_argument("gammas must be nonnegative");
    if (!(noise_powers[i] > 0.0))
      throw std::invalid_argument("noise powers must be positive");
  }
}

}  // namespace

SafeMarginCoeffs safe_margin_coeffs(int order) {
  if (!is_power_of_two(order))
    throw std::invalid_argument(
        "safe_margin_coeffs: order must be a power of two, at least 2");
  const double c = 1.0 / std::tan(kPi / order);
  return {cd(1.0, c), cd(1.0, -c)};
}

double safe_margin(const VecXc& h_u, const VecXc& x, cd s_u, int order) {
  if (h_u.size() != x.size())
    throw std::invalid_argument("safe_margin: dimension mismatch");
  if (s_u == cd(0.0, 0.0))
    throw std::invalid_argument("safe_margin: symbol must be nonzero");
  const SafeMarginCoeffs k = safe_margin_coeffs(order);
  // h_bar^H x = exp(-j arg(s_u)) h^H x
  const cd z = std::polar(1.0, -std::arg(s_u)) * (h_u.adjoint() * x)(0, 0);
  return std::min((k.k1 * z).real(), (k.k2 * z).real());
}

SepBounds sep_bounds(double alpha, double sigma_sq, int order) {
  if (!(sigma_sq > 0.0))
    throw std::invalid_argument("sep_bounds: noise power must be positive");
  if (!is_power_of_two(order))
    throw std::invalid_argument(
        "sep_bounds: order must be a power of two, at least 2");
  const double d =
      std::sqrt(2.0) * std::sin(kPi / order) * alpha / std::sqrt(sigma_sq);
  const double tail = 0.5 * std::erfc(d / std::sqrt(2.0));
  SepBounds b;
  b.lower = tail;
  b.upper = 2.0 * tail;
  b.upper_clamped = std::min(1.0, b.upper);
  return b;
}

QosConstraintSet build_qos_constraints(const MatXc& h, const VecXc& s,
                                       const std::vector<double>& gammas,
                                       const std::vector<double>& noise_powers,
                                       int order) {
  check_sizes(h, s, gammas, noise_powers);
  const SafeMarginCoeffs k = safe_margin_coeffs(order);
  const Eigen::Index u = h.rows();
  QosConstraintSet set;
  set.rows_per_user = 2;
  set.rows.resize(2 * u, h.cols());
  set.rhs.resize(2 * u);
  for (Eigen::Index i = 0; i < u; ++i) {
    const cd rot = std::polar(1.0, -std::arg(s(i)));
    const Eigen::RowVectorXcd hbar_h = rot * h.row(i).conjugate();
    set.rows.row(2 * i) = k.k1 * hbar_h;
    set.rows.row(2 * i + 1) = k.k2 * hbar_h;
    const double lambda = std::sqrt(gammas[i] * noise_powers[i]);
    set.rhs(2 * i) = lambda;
    set.rhs(2 * i + 1) = lambda;
  }
  return set;
}

QosConstraintSet build_mmse_constraints(
    const MatXc& h, const VecXc& s, const std::vector<double>& gammas,
    const std::vector<double>& noise_powers, int order) {
  check_sizes(h, s, gammas, noise_powers);
  const Eigen::Index u = h.rows();
  const double sec = 1.0 / std::cos(kPi / order);
  const double tan = std::tan(kPi / order);
  const double apothem_scale = std::cos(kPi / 8.0);
  QosConstraintSet set;
  set.rows_per_user = 8;
  set.rows.resize(8 * u, h.cols());
  set.rhs.resize(8 * u);
  for (Eigen::Index i = 0; i < u; ++i) {
    const cd rot = std::polar(1.0, -std::arg(s(i)));
    const Eigen::RowVectorXcd hbar_h = rot * h.row(i).conjugate();
    const double lambda = std::sqrt(gammas[i] * noise_powers[i]);
    const double center = lambda * sec;      // on the rotated real axis
    const double radius = lambda * tan;
    for (int f = 0; f < 8; ++f) {
      const cd dir = std::polar(1.0, -2.0 * kPi * f / 8.0);
      // Re(dir (h_bar^H x - center)) <= radius cos(pi/8), flipped to >=
      set.rows.row(8 * i + f) = -dir * hbar_h;
      set.rhs(8 * i + f) =
          -radius * apothem_scale - center * dir.real();
    }
  }
  return set;
}

double min_safe_margin(const MatXc& h, const VecXc& x, const VecXc& s,
                       int order) {
  if (h.rows() == 0)
    throw std::invalid_argument("min_safe_margin: no users");
  double best = 0.0;
  for (Eigen::Index u = 0; u < h.rows(); ++u) {
    const double a = safe_margin(h.row(u).transpose(), x, s(u), order);
    best = (u == 0) ? a : std::min(best, a);
  }
  return best;
}

}  // namespace isac
