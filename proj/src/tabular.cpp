#include "qimpute/tabular.hpp"

#include "qimpute/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace qimpute {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_real(std::string_view text, double& out) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out, std::chars_format::general);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

Dataset::Dataset(std::vector<std::string> column_names, Matrix values,
                 std::optional<std::string> target_column, std::vector<std::int64_t> ids)
    : names_(std::move(column_names)), values_(std::move(values)), target_(std::move(target_column)),
      ids_(std::move(ids)) {
    if (names_.size() != values_.cols())
        throw DataError("dataset has " + std::to_string(names_.size()) + " column names but " +
                        std::to_string(values_.cols()) + " value columns");
    std::set<std::string_view> seen;
    for (const auto& name : names_) {
        if (name.empty()) throw DataError("empty column name");
        if (name == kIdColumn) throw DataError("column name 'id' is reserved for the row identifier");
        if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
    }
    if (target_ && !seen.contains(*target_))
        throw DataError("target column '" + *target_ + "' not found");
    for (std::size_t r = 0; r < values_.rows(); ++r)
        for (std::size_t c = 0; c < values_.cols(); ++c)
            if (!std::isfinite(values_(r, c)))
                throw DataError("non-finite value at row " + std::to_string(r + 1) + ", column " + names_[c]);
    if (ids_.empty()) {
        ids_.resize(values_.rows());
        std::iota(ids_.begin(), ids_.end(), std::int64_t{0});
    } else if (ids_.size() != values_.rows()) {
        throw DataError("id column length does not match row count");
    } else if (std::set<std::int64_t>(ids_.begin(), ids_.end()).size() != ids_.size()) {
        throw DataError("row ids are not unique");
    }
}

std::optional<std::size_t> Dataset::find_column(std::string_view name) const noexcept {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
}

std::size_t Dataset::column_index(std::string_view name) const {
    if (auto idx = find_column(name)) return *idx;
    throw DataError("unknown column '" + std::string(name) + "'");
}

std::vector<std::size_t> Dataset::column_indices(const std::vector<std::string>& names) const {
    std::vector<std::size_t> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(column_index(n));
    return out;
}

std::vector<double> Dataset::column(std::size_t index) const {
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) out[r] = values_(r, index);
    return out;
}

std::vector<std::string> Dataset::feature_columns() const {
    std::vector<std::string> out;
    for (const auto& n : names_)
        if (!target_ || n != *target_) out.push_back(n);
    return out;
}

Dataset load_csv(const std::filesystem::path& path, std::optional<std::string> target_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();

    std::vector<std::string_view> lines;
    {
        std::string_view rest = text;
        if (rest.starts_with("\xEF\xBB\xBF")) rest.remove_prefix(3);
        while (!rest.empty()) {
            const auto nl = rest.find('\n');
            const std::string_view line = rest.substr(0, nl);
            if (!trim(line).empty()) lines.push_back(line);
            if (nl == std::string_view::npos) break;
            rest.remove_prefix(nl + 1);
        }
    }
    if (lines.size() < 2) throw DataError("'" + path.string() + "': no rows");

    const auto header_fields = split_fields(lines.front());
    std::vector<std::string> names(header_fields.begin(), header_fields.end());
    {
        std::set<std::string_view> seen;
        for (const auto& n : names)
            if (!seen.insert(n).second) throw DataError("'" + path.string() + "': duplicate header '" + n + "'");
    }
    const std::size_t width = names.size();
    const bool drop_id = !names.empty() && names.back() == kIdColumn;
    const std::size_t value_cols = drop_id ? width - 1 : width;

    Matrix values(lines.size() - 1, value_cols);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto fields = split_fields(lines[r]);
        if (fields.size() != width)
            throw DataError("'" + path.string() + "': row " + std::to_string(r) + " has " +
                            std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
        for (std::size_t c = 0; c < value_cols; ++c) {
            double v = 0.0;
            if (!parse_real(fields[c], v))
                throw DataError("'" + path.string() + "': row " + std::to_string(r) + ", column " + names[c] +
                                ": cannot parse '" + std::string(fields[c]) + "' as a number");
            values(r - 1, c) = v;
        }
    }
    if (drop_id) names.pop_back();
    if (target_column && std::find(names.begin(), names.end(), *target_column) == names.end())
        throw DataError("'" + path.string() + "': target column '" + *target_column + "' not found");
    return Dataset(std::move(names), std::move(values), std::move(target_column));
}

void save_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    for (const auto& name : d.column_names()) out << name << ',';
    out << kIdColumn << '\n';
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < d.cols(); ++c) out << format_real(d(r, c)) << ',';
        out << d.ids()[r] << '\n';
    }
    out.flush();
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

MissingMask::MissingMask(std::size_t rows, std::size_t cols, std::vector<std::string> impute_columns,
                         std::vector<std::size_t> impute_indices, std::vector<std::uint8_t> entries)
    : rows_(rows), cols_(cols), impute_columns_(std::move(impute_columns)),
      impute_indices_(std::move(impute_indices)), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) throw DataError("mask size does not match its shape");
    if (impute_columns_.size() != impute_indices_.size())
        throw DataError("mask column names and indices differ in length");
}

std::size_t MissingMask::count(std::size_t col) const noexcept {
    std::size_t n = 0;
    for (std::size_t r = 0; r < rows_; ++r) n += missing(r, col) ? 1 : 0;
    return n;
}

std::size_t MissingMask::total() const noexcept {
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](auto v) { return v != 0; }));
}

MissingMask derive_mask(const Dataset& d, const std::vector<std::string>& impute_columns) {
    std::vector<std::size_t> indices;
    std::set<std::string_view> seen;
    for (const auto& name : impute_columns) {
        if (name == kIdColumn) throw DataError("the id column cannot be imputed");
        if (d.target_column() && name == *d.target_column())
            throw DataError("target column '" + name + "' cannot be imputed");
        if (!seen.insert(name).second) throw DataError("column '" + name + "' listed twice for imputation");
        indices.push_back(d.column_index(name));
    }
    std::vector<std::uint8_t> entries(d.rows() * d.cols(), 0);
    for (std::size_t c : indices)
        for (std::size_t r = 0; r < d.rows(); ++r)
            if (d(r, c) == 0.0) entries[r * d.cols() + c] = 1;
    return MissingMask(d.rows(), d.cols(), impute_columns, std::move(indices), std::move(entries));
}

} // namespace qimpute
