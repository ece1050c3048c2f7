#pragma once

namespace idrs {

// Alternate certificate through Renyi divergences between isotropic
// Gaussians. Informational only: the CLI never mixes it with the
// Neyman-Pearson certificate.

struct RenyiQuery {
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  int dof = 1;
  double pA = 0.9;
  double pB = 0.1;
  int alpha_grid_points = 512; // log-spaced, then golden-section refinement
};

// Admissible orders: sigma0 >= sigma1 allows any alpha > 0 except 1;
// sigma0 < sigma1 additionally needs alpha <= sigma1^2/(sigma1^2 - sigma0^2)
// so that the mixed variance (1-alpha) sigma1^2 + alpha sigma0^2 stays
// nonnegative.
bool renyi_alpha_admissible(double sigma0, double sigma1, double alpha);

// D_alpha(N(x1, sigma1^2 I) || N(x0, sigma0^2 I)) at ||x1 - x0|| = distance.
// Throws std::domain_error for inadmissible alpha.
double renyi_divergence_isotropic(double sigma0, double sigma1, int dof, double alpha,
                                  double distance);

// Divergence budget -log(1 - 2 M_1 + 2 M_{1-alpha}) under which two discrete
// distributions must share their top class; M_p is the order-p power mean.
double li_condition_rhs(double pA, double pB, double alpha);

// sup over admissible alpha of the certified radius; 0 when no order yields a
// positive value.
double renyi_certified_radius(const RenyiQuery& q);

} // namespace idrs
