#pragma once

// Dataset CSV ingestion and serialization.
//
// Layout: one row per observation, numeric cells separated by commas. By
// default the first column is the response and the remaining columns form
// the design matrix. A first row whose cells are all non-numeric is taken as
// a header.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "shrinkmc/error.hpp"
#include "shrinkmc/model.hpp"
#include "shrinkmc/simgen.hpp"

namespace shrinkmc {

/// Malformed CSV input. Row and column are 1-based positions in the file
/// (0 when not applicable).
class CsvError : public DomainError {
public:
    CsvError(std::size_t row, std::size_t column, const std::string& what);

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

struct CsvOptions {
    /// 0-based column holding the response.
    std::size_t response_column = 0;
    /// Group sizes for the design columns; must sum to p.
    std::optional<std::vector<Index>> group_sizes;
};

struct LoadedDataset {
    Dataset dataset;
    std::optional<GroupStructure> groups;
    std::vector<std::string> header;
};

LoadedDataset parse_dataset_csv(std::istream& in, const CsvOptions& options = {});
LoadedDataset read_dataset_csv(const std::string& path, const CsvOptions& options = {});

/// Parses "5,5,5". Throws DomainError on empty or non-positive entries.
std::vector<Index> parse_group_sizes(std::string_view text);
std::string format_group_sizes(const GroupStructure& groups);

/// Writes a header "y,x1,...,xp" and one row per observation, 17 significant
/// digits.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Shortest-form printing with `digits` significant digits ("%.*g").
std::string format_double(double value, int digits);

}  // namespace shrinkmc
