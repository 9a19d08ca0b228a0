#pragma once

#include "qimpute/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qimpute {

// Name of the synthetic row identifier column written last by save_csv.
inline constexpr std::string_view kIdColumn = "id";

// Column-labelled numeric table. Values exclude the id column, which is kept
// separately and never enters a numeric transform. The optional target column
// is stored with the values but is not a feature.
class Dataset {
public:
    Dataset() = default;

    // Validates shape, finiteness, unique non-reserved column names and that
    // the target (if any) names an existing column. Ids default to row index.
    Dataset(std::vector<std::string> column_names, Matrix values,
            std::optional<std::string> target_column = std::nullopt,
            std::vector<std::int64_t> ids = {});

    std::size_t rows() const noexcept { return values_.rows(); }
    std::size_t cols() const noexcept { return values_.cols(); }

    const std::vector<std::string>& column_names() const noexcept { return names_; }
    const std::optional<std::string>& target_column() const noexcept { return target_; }
    const std::vector<std::int64_t>& ids() const noexcept { return ids_; }

    const Matrix& values() const noexcept { return values_; }
    Matrix& values() noexcept { return values_; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_(r, c); }
    double& operator()(std::size_t r, std::size_t c) noexcept { return values_(r, c); }

    std::optional<std::size_t> find_column(std::string_view name) const noexcept;
    std::size_t column_index(std::string_view name) const;   // throws DataError
    std::vector<std::size_t> column_indices(const std::vector<std::string>& names) const;
    std::vector<double> column(std::size_t index) const;

    // All columns except the target, in file order.
    std::vector<std::string> feature_columns() const;

private:
    std::vector<std::string> names_;
    Matrix values_;
    std::optional<std::string> target_;
    std::vector<std::int64_t> ids_;
};

// Reads a comma-separated file with one header row. A trailing `id` column
// (as written by save_csv) is dropped; ids are always regenerated from row
// order. Throws DataError naming the row and column of any bad cell.
Dataset load_csv(const std::filesystem::path& path,
                 std::optional<std::string> target_column = std::nullopt);

// Writes the columns in order followed by `id`. Reals use the shortest
// representation that reads back to the same double.
void save_csv(const Dataset& d, const std::filesystem::path& path);

// Cells that encode a missing value: exact zeros in the designated columns.
// Immutable once derived.
class MissingMask {
public:
    MissingMask() = default;
    MissingMask(std::size_t rows, std::size_t cols, std::vector<std::string> impute_columns,
                std::vector<std::size_t> impute_indices, std::vector<std::uint8_t> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool missing(std::size_t r, std::size_t c) const noexcept { return entries_[r * cols_ + c] != 0; }
    std::span<const std::uint8_t> row(std::size_t r) const noexcept { return {entries_.data() + r * cols_, cols_}; }

    const std::vector<std::string>& impute_columns() const noexcept { return impute_columns_; }
    const std::vector<std::size_t>& impute_indices() const noexcept { return impute_indices_; }

    std::size_t count(std::size_t col) const noexcept;
    std::size_t total() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::string> impute_columns_;
    std::vector<std::size_t> impute_indices_;
    std::vector<std::uint8_t> entries_;
};

// Marks exact zeros in the given columns. The target and id columns cannot be
// imputed.
MissingMask derive_mask(const Dataset& d, const std::vector<std::string>& impute_columns);

} // namespace qimpute
