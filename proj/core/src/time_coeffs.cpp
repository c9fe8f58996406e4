#include "nekmini/time_coeffs.hpp"

#include "nekmini/error.hpp"

namespace nekmini {

TimeCoeffs bdf_ext_coeffs(int k) {
  TimeCoeffs c;
  c.order = k;
  switch (k) {
    case 1:
      c.beta = {1.0, -1.0};
      c.alpha = {1.0};
      break;
    case 2:
      c.beta = {1.5, -2.0, 0.5};
      c.alpha = {2.0, -1.0};
      break;
    case 3:
      c.beta = {11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0};
      c.alpha = {3.0, -3.0, 1.0};
      break;
    default:
      throw ContractError("time order must be 1, 2 or 3 (got " + std::to_string(k) + ")");
  }
  return c;
}

std::vector<double> lagrange_weights(const std::vector<double>& ts, double t) {
  std::vector<double> w(ts.size(), 1.0);
  for (size_t i = 0; i < ts.size(); ++i)
    for (size_t j = 0; j < ts.size(); ++j)
      if (j != i) w[i] *= (t - ts[j]) / (ts[i] - ts[j]);
  return w;
}

}  // namespace nekmini
