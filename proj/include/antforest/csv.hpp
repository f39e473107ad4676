#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace antforest {

// Decimal formatting at 12 significant digits; round-trips all values this
// project serializes and keeps files byte-stable across runs.
std::string format_number(double v);

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    CsvWriter& field(const std::string& s);
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    void end_row();

    // Flushes and reports failure as an exception.
    void close();

private:
    std::ofstream out_;
    std::string path_;
    bool row_open_ = false;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

// Reads a whole CSV (no quoting/escaping; this project never emits either).
CsvTable read_csv(const std::string& path);

}  // namespace antforest
