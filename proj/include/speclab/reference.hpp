#pragma once

#include <span>
#include <vector>

// Closed-form values for balls, unions of balls and rectangles. These serve
// as the analytic side of every comparison against the two-ball set and the
// ball.
namespace speclab::reference {

/// Bessel function of the first kind, integer order, via the periodic
/// integral J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt evaluated by
/// the trapezoidal rule (spectrally accurate for periodic integrands).
double bessel_j(int n, double x);

/// Positive zeros of J_n below `limit`, by sign bracketing and bisection.
std::vector<double> bessel_j_zeros_below(int n, double limit);
std::vector<double> bessel_j_zeros(int n, int count);

/// Spherical Bessel j_l via upward recurrence (accurate for x > l).
double spherical_bessel_j(int l, double x);
std::vector<double> spherical_bessel_j_zeros_below(int l, double limit);

/// First `count` Dirichlet eigenvalues (with multiplicity) of a ball.
std::vector<double> ball_spectrum(int dim, double radius, int count);
/// Disjoint union of balls: sorted merge of the ball spectra.
std::vector<double> balls_spectrum(int dim, std::span<const double> radii, int count);
/// Two balls of measure omega_d / 2 each.
std::vector<double> theta_spectrum(int dim, int count);
std::vector<double> rectangle_spectrum(double a, double b, int count);

/// lambda_k (1-based) of the two balls of measures (1/2 + t) and (1/2 - t)
/// times omega_d.
double volume_split_eigenvalue(int dim, double t, int k);

/// T(B_r) = omega_d r^{d+2} / (d (d+2)), from w = (r^2 - |x|^2) / (2d).
double ball_torsion(int dim, double radius);
/// sup of the ball torsion function, r^2 / (2d).
double ball_torsion_sup(int dim, double radius);
double theta_torsion(int dim);
/// sup over the boundary of |grad w| on the two-ball set, r/d with r = 2^{-1/d}.
double theta_boundary_gradient(int dim);

/// 1/d + 1/(2^{2/d} d^2): torsion-defect per unit of uncovered volume.
double torsion_volume_constant(int dim);
/// exp(1/(4 pi)).
double eigen_torsion_constant();
/// (1 + 4/d) k^{2/d}.
double cheng_yang_factor(int dim, int k);

/// Analytic values for the ball and the two-ball set of measure omega_d.
struct References {
  int dim = 2;
  double measure = 0.0;
  std::vector<double> ball;   // lambda_k(B), k = 1..count
  std::vector<double> theta;  // lambda_k(Theta)
  double torsion_ball = 0.0;
  double torsion_theta = 0.0;
  double sup_w_ball = 0.0;
  double boundary_grad_theta = 0.0;
};

References references(int dim, int count);

}  // namespace speclab::reference
