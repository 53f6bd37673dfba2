#include "scgk/chebyshev.hpp"

#include <array>
#include <string>

namespace scgk::cheb {

std::vector<double> weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = weight(k);
  return w;
}

std::vector<double> weights(std::size_t n, WeightConvention c) {
  if (c == WeightConvention::kHalvedT0) return weights(n);
  std::vector<double> w(n, std::numbers::pi / 2);
  if (n > 0) w[0] = std::numbers::pi;
  return w;
}

std::vector<double> boundary_row(int order, int endpoint, std::size_t M) {
  if (endpoint != 1 && endpoint != -1) throw std::invalid_argument("boundary_row: endpoint must be +1 or -1");
  if (order < 0 || order > 2) throw std::invalid_argument("boundary_row: unsupported order " + std::to_string(order));
  std::vector<double> row(M + 1);
  for (std::size_t j = 0; j <= M; ++j) {
    const double jj = double(j) * double(j);
    double v = 1.0;
    if (order == 1) v = jj;
    if (order == 2) v = (jj * jj - jj) / 3.0;
    // T^{(p)}_j(-1) = (-1)^{j+p} T^{(p)}_j(1)
    if (endpoint < 0 && (j + order) % 2 == 1) v = -v;
    row[j] = v;
  }
  return row;
}

std::array<ExpansionTerm, 3> second_derivative_expansion(std::size_t k) {
  if (k < 3) throw std::invalid_argument("second_derivative_expansion: k must be >= 3");
  const double kd = double(k);
  return {ExpansionTerm{k + 2, 1.0 / (2.0 * (kd + 1) * (kd + 2))},
          ExpansionTerm{k, -1.0 / ((kd - 1) * (kd + 1))},
          ExpansionTerm{k - 2, 1.0 / (2.0 * (kd - 1) * (kd - 2))}};
}

}  // namespace scgk::cheb
