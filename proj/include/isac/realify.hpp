/**
 * Complex-to-real lifting used by the binary programs.  The lifted vector is
 * x_tilde = [Re x; Im x].  Objectives are conjugated inner products and lift
 * as w_tilde = [Re w; Im w], so Re(w^H x) = w_tilde^T x_tilde exactly;
 * constraint rows are unconjugated products and lift as [Re A, -Im A], so
 * Re(A x) = A_tilde x_tilde exactly.
 */
#pragma once

#include "isac/types.hpp"

namespace isac {

VecX realify_vector(const VecXc& x);
VecXc unrealify_vector(const VecX& xt);

/** Lift of a conjugated objective functional x -> Re(w^H x). */
VecX realify_objective(const VecXc& w);

/** Lift of unconjugated constraint rows x -> Re(A x). */
MatX realify_rows(const MatXc& a);

}  // namespace isac
