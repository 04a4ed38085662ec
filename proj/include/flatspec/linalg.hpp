#pragma once

#include <optional>
#include <vector>

#include "flatspec/rational.hpp"

namespace flatspec {

using QVec = std::vector<Q>;
using QMatrix = std::vector<QVec>;

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(QMatrix& m, int cols);
int rank(const QMatrix& m, int cols);
// Basis of {x : m x = 0}.
QMatrix null_space(const QMatrix& m, int cols);
// Independent rows spanning the row space.
QMatrix row_space(const QMatrix& m, int cols);
// Some solution of m x = b, or none.
std::optional<QVec> solve(const QMatrix& m, const QVec& b, int cols);

Q dot(const QVec& a, const QVec& b);

}  // namespace flatspec
