#include "shrinkmc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace shrinkmc {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

bool parse_number(std::string_view cell, double& value) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

CsvError::CsvError(std::size_t row, std::size_t column, const std::string& what)
    : DomainError("csv row " + std::to_string(row) +
                  (column > 0 ? ", column " + std::to_string(column) : std::string()) + ": " +
                  what),
      row_(row),
      column_(column) {}

LoadedDataset parse_dataset_csv(std::istream& in, const CsvOptions& options) {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t first_data_line = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_cells(line);

        std::vector<double> values(cells.size());
        std::size_t numeric = 0;
        std::size_t first_bad = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (parse_number(cells[c], values[c])) {
                ++numeric;
            } else if (first_bad == 0) {
                first_bad = c + 1;
            }
        }

        if (width == 0) {
            width = cells.size();
            if (numeric == 0) {
                for (auto cell : cells) header.emplace_back(cell);
                continue;
            }
        }
        if (cells.size() != width) {
            throw CsvError(line_no, std::min(cells.size(), width) + 1,
                           "ragged row: expected " + std::to_string(width) + " cells, found " +
                               std::to_string(cells.size()));
        }
        if (first_bad != 0) {
            throw CsvError(line_no, first_bad,
                           "non-numeric cell '" + std::string(cells[first_bad - 1]) + "'");
        }
        if (rows.empty()) first_data_line = line_no;
        rows.push_back(std::move(values));
    }

    if (rows.empty()) throw CsvError(line_no, 0, "no data rows");
    if (width < 2) throw CsvError(first_data_line, 0, "need a response column and at least one covariate");
    if (options.response_column >= width) {
        throw CsvError(first_data_line, 0,
                       "response column " + std::to_string(options.response_column + 1) +
                           " is out of range (" + std::to_string(width) + " columns)");
    }

    const auto n = static_cast<Index>(rows.size());
    const auto p = static_cast<Index>(width - 1);
    Vector y(n);
    Matrix x(n, p);
    for (Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        Index col = 0;
        for (std::size_t c = 0; c < width; ++c) {
            if (c == options.response_column) {
                y[i] = r[c];
            } else {
                x(i, col++) = r[c];
            }
        }
    }

    LoadedDataset out{Dataset(std::move(y), std::move(x)), std::nullopt, std::move(header)};
    if (options.group_sizes) {
        GroupStructure groups(*options.group_sizes);
        groups.check_covers(p);
        out.groups = std::move(groups);
    }
    return out;
}

LoadedDataset read_dataset_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open dataset file '" + path + "'");
    return parse_dataset_csv(in, options);
}

std::vector<Index> parse_group_sizes(std::string_view text) {
    std::vector<Index> sizes;
    for (auto cell : split_cells(trim(text))) {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() || v < 1) {
            throw DomainError("invalid group size '" + std::string(cell) + "' in '" +
                              std::string(text) + "'");
        }
        sizes.push_back(static_cast<Index>(v));
    }
    return sizes;
}

std::string format_group_sizes(const GroupStructure& groups) {
    std::string out;
    for (Index k = 0; k < groups.num_groups(); ++k) {
        if (k > 0) out += ',';
        out += std::to_string(groups.size(k));
    }
    return out;
}

std::string format_double(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, value);
    return buf;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    out << "y";
    for (Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
    out << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        out << format_double(data.y()[i], 17);
        for (Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.x()(i, j), 17);
        out << '\n';
    }
}

}  // namespace shrinkmc
