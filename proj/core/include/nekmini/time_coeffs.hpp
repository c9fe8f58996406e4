#pragma once

#include <vector>

namespace nekmini {

// BDFk / EXTk coefficients for a uniform step: beta_0..beta_k with
// beta_0 u^n + sum_j beta_j u^{n-j} ~ dt du/dt, and alpha_1..alpha_k.
struct TimeCoeffs {
  int order = 1;
  std::vector<double> beta;
  std::vector<double> alpha;
};

TimeCoeffs bdf_ext_coeffs(int k);

// Lagrange weights at t for the nodes ts.
std::vector<double> lagrange_weights(const std::vector<double>& ts, double t);

}  // namespace nekmini
