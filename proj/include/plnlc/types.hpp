#ifndef PLNLC_TYPES_HPP
#define PLNLC_TYPES_HPP

#include <Eigen/Dense>

namespace plnlc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ArrayXX = Eigen::ArrayXXd;
using MaskGrid = Eigen::ArrayXXi; // 0 = missing, 1 = observed

} // namespace plnlc

#endif // PLNLC_TYPES_HPP
