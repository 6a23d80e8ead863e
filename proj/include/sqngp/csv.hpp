#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sqngp {

/// Minimal CSV emitter: comma separated, LF line endings, doubles printed
/// with 17 significant digits so files round-trip and compare byte-for-byte.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void field(double v);
    void field(long v);
    void field(const std::string& v);
    void end_row();
    void row(const std::vector<std::string>& cells);

private:
    void sep();

    std::ostream& out_;
    bool first_ = true;
};

std::string format_double(double v);

/// Parses a numeric CSV with a header row. Returns the header names and the
/// rows; throws sqngp::Error on ragged rows or unparsable cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(std::istream& in);

}  // namespace sqngp
