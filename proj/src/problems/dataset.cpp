#include "sqngp/problems/dataset.hpp"

#include "sqngp/csv.hpp"

#include <ostream>

namespace sqngp::problems {

void write_series_csv(std::ostream& out, const Matrix& y) {
    CsvWriter csv(out);
    std::vector<std::string> header{"t"};
    if (y.cols() == 1) {
        header.emplace_back("y");
    } else {
        for (Eigen::Index j = 0; j < y.cols(); ++j) header.push_back("y" + std::to_string(j + 1));
    }
    csv.row(header);
    for (Eigen::Index t = 0; t < y.rows(); ++t) {
        csv.field(static_cast<long>(t + 1));
        for (Eigen::Index j = 0; j < y.cols(); ++j) csv.field(y(t, j));
        csv.end_row();
    }
}

void write_series_csv(std::ostream& out, const Vector& y) { write_series_csv(out, Matrix(y)); }

Matrix read_series_csv(std::istream& in) {
    const CsvTable table = read_csv(in);
    if (table.header.size() < 2 || table.header.front() != "t") throw Error("read_series_csv: expected header t,y...");
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    const auto channels = static_cast<Eigen::Index>(table.header.size() - 1);
    Matrix y(n, channels);
    for (Eigen::Index t = 0; t < n; ++t)
        for (Eigen::Index j = 0; j < channels; ++j) y(t, j) = table.rows[t][j + 1];
    return y;
}

}  // namespace sqngp::problems
