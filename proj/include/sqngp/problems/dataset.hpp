#pragma once

#include "sqngp/types.hpp"

#include <iosfwd>

namespace sqngp::problems {

/// Columns t,y (t = 1..N) or t,y1,y2,... for multivariate series (one column
/// of `y` per output channel).
void write_series_csv(std::ostream& out, const Matrix& y);
void write_series_csv(std::ostream& out, const Vector& y);

/// Inverse of write_series_csv; returns N x channels.
Matrix read_series_csv(std::istream& in);

}  // namespace sqngp::problems
