#pragma once

namespace nutrieval::eval {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and 0 <= x <= 1,
/// by modified Lentz evaluation of the continued fraction (relative
/// tolerance 1e-15). Throws std::domain_error outside the domain.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `df`
/// degrees of freedom: I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace nutrieval::eval
