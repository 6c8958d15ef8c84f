#pragma once

#include <vector>

namespace rabinrl {

// Solves A x = b by Gaussian elimination with partial pivoting. A is dense
// row-major n*n and is consumed. Throws std::runtime_error on a singular
// pivot.
std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                std::vector<double> b);

} // namespace rabinrl
