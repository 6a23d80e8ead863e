#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sqngp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown for violated preconditions and numerical failures in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sqngp
