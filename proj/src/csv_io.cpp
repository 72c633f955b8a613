#include "ustat/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "ustat/error.hpp"

namespace ustat {

Sample read_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "'");

    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    std::size_t blank_at = 0;  // deferred so a trailing blank line is tolerated
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) {
            if (blank_at == 0) blank_at = line_no;
            continue;
        }
        if (blank_at != 0) {
            fail(ErrorCode::parse_error,
                 path + ": blank line " + std::to_string(blank_at) + " inside the data");
        }
        const std::size_t end = line.find_last_not_of(" \t") + 1;

        double v = 0.0;
        const char* first = line.data() + begin;
        const char* last = line.data() + end;
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) {
            fail(ErrorCode::parse_error, path + ": line " + std::to_string(line_no) +
                                             ": cannot parse '" + line.substr(begin, end - begin) +
                                             "' as a real");
        }
        if (!std::isfinite(v)) {
            fail(ErrorCode::parse_error,
                 path + ": line " + std::to_string(line_no) + ": non-finite value");
        }
        values.push_back(v);
    }
    if (values.empty()) {
        fail(ErrorCode::insufficient_sample, path + ": no observations (empty sample)");
    }
    return Sample(std::move(values));
}

}  // namespace ustat
