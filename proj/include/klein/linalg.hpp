#pragma once

#include <vector>

#include "klein/tower.hpp"

namespace klein {

// Dense exact matrix over one field tower.
struct Mat {
  TowerPtr tower;
  int rows = 0, cols = 0;
  std::vector<FieldElement> a;  // row-major

  static Mat zero(const TowerPtr& t, int r, int c);
  FieldElement& at(int r, int c) { return a[size_t(r) * cols + c]; }
  const FieldElement& at(int r, int c) const {
    return a[size_t(r) * cols + c];
  }
};

// In-place reduction to reduced row echelon form (monic pivots, zeros above
// and below); returns the pivot columns in increasing order.
std::vector<int> rref(Mat& m);

int rank(Mat m);  // by value: reduces a copy

// Basis of the right kernel { v : M v = 0 }: one vector per free column,
// free coordinate set to 1.
std::vector<std::vector<FieldElement>> kernel_basis(Mat m);

}  // namespace klein
