#pragma once

#include <Eigen/Core>

namespace pdd {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Row-major so that .data() matches the on-disk sample order of PGM/raw rasters.
using ImageArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace pdd
