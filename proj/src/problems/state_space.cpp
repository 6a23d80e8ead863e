#include "sqngp/problems/state_space.hpp"

#include <cmath>

namespace sqngp::problems {

double var_from_log(double log_var) { return std::exp(std::max(log_var, kLogVarFloor)); }

double dvar_dlog(double log_var) { return log_var > kLogVarFloor ? std::exp(log_var) : 0.0; }

}  // namespace sqngp::problems
