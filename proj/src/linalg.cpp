#include "klein/linalg.hpp"

#include <algorithm>

namespace klein {

Mat Mat::zero(const TowerPtr& t, int r, int c) {
  Mat m;
  m.tower = t;
  m.rows = r;
  m.cols = c;
  m.a.assign(size_t(r) * c, t->zero());
  return m;
}

std::vector<int> rref(Mat& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int pr = -1;
    for (int i = r; i < m.rows; ++i)
      if (!m.at(i, c).is_zero()) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    if (pr != r)
      for (int j = c; j < m.cols; ++j) std::swap(m.at(pr, j), m.at(r, j));
    FieldElement inv = m.at(r, c).inverse();
    for (int j = c; j < m.cols; ++j) m.at(r, j) = m.at(r, j) * inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || m.at(i, c).is_zero()) continue;
      FieldElement f = m.at(i, c);
      for (int j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

int rank(Mat m) { return static_cast<int>(rref(m).size()); }

std::vector<std::vector<FieldElement>> kernel_basis(Mat m) {
  std::vector<int> pivots = rref(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<std::vector<FieldElement>> out;
  for (int free = 0; free < m.cols; ++free) {
    if (is_pivot[free]) continue;
    std::vector<FieldElement> v(m.cols, m.tower->zero());
    v[free] = m.tower->one();
    for (size_t i = 0; i < pivots.size(); ++i)
      v[pivots[i]] = -m.at(static_cast<int>(i), free);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace klein
