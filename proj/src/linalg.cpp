#include "flatspec/linalg.hpp"

#include <stdexcept>

namespace flatspec {

std::vector<int> rref(QMatrix& m, int cols) {
  std::vector<int> piv;
  int r = 0;
  const int rows = static_cast<int>(m.size());
  for (int c = 0; c < cols && r < rows; ++c) {
    int p = -1;
    for (int i = r; i < rows; ++i)
      if (sgn(m[i][c]) != 0) {
        p = i;
        break;
      }
    if (p < 0) continue;
    std::swap(m[r], m[p]);
    const Q inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || sgn(m[i][c]) == 0) continue;
      const Q f = m[i][c];
      for (size_t j = 0; j < m[i].size(); ++j) m[i][j] -= f * m[r][j];
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

int rank(const QMatrix& m, int cols) {
  QMatrix a = m;
  return static_cast<int>(rref(a, cols).size());
}

QMatrix null_space(const QMatrix& m, int cols) {
  QMatrix a = m;
  const auto piv = rref(a, cols);
  std::vector<int> is_piv(cols, -1);
  for (size_t i = 0; i < piv.size(); ++i) is_piv[piv[i]] = static_cast<int>(i);
  QMatrix out;
  for (int f = 0; f < cols; ++f) {
    if (is_piv[f] >= 0) continue;
    QVec v(cols, Q(0));
    v[f] = 1;
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -a[i][f];
    out.push_back(v);
  }
  return out;
}

QMatrix row_space(const QMatrix& m, int cols) {
  QMatrix a = m;
  const auto piv = rref(a, cols);
  a.resize(piv.size());
  return a;
}

std::optional<QVec> solve(const QMatrix& m, const QVec& b, int cols) {
  QMatrix a = m;
  for (size_t i = 0; i < a.size(); ++i) a[i].push_back(b[i]);
  const auto piv = rref(a, cols + 1);
  if (!piv.empty() && piv.back() == cols) return std::nullopt;
  QVec x(cols, Q(0));
  for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = a[i][cols];
  return x;
}

Q dot(const QVec& a, const QVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  Q s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace flatspec
