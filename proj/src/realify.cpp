#include "isac/realify.hpp"

#include <stdexcept>

namespace isac {

VecX realify_vector(const VecXc& x) {
  VecX out(2 * x.size());
  out.head(x.size()) = x.real();
  out.tail(x.size()) = x.imag();
  return out;
}

VecXc unrealify_vector(const VecX& xt) {
  if (xt.size() % 2 != 0)
    throw std::invalid_argument("unrealify_vector: length must be even");
  const Eigen::Index n = xt.size() / 2;
  VecXc out(n);
  out.real() = xt.head(n);
  out.imag() = xt.tail(n);
  return out;
}

VecX realify_objective(const VecXc& w) {
  VecX out(2 * w.size());
  out.head(w.size()) = w.real();
  out.tail(w.size()) = w.imag();
  return out;
}

MatX realify_rows(const MatXc& a) {
  MatX out(a.rows(), 2 * a.cols());
  out.leftCols(a.cols()) = a.real();
  out.rightCols(a.cols()) = -a.imag();
  return out;
}

}  // namespace isac
