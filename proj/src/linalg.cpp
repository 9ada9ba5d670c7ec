#include "polycut/linalg.hpp"

namespace cps {

QMat rational_restriction(const FMat& m, int degree) {
  QMat out(m.rows() * degree, m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      std::vector<Rat> c = m(i, j).coeffs_padded(degree);
      for (int t = 0; t < degree; ++t) out(i * degree + t, j) = c[t];
    }
  return out;
}

std::optional<QMat> as_rational(const FMat& m) {
  QMat out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      if (!m(i, j).is_rational()) return std::nullopt;
      out(i, j) = m(i, j).rational();
    }
  return out;
}

}  // namespace cps
