#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ammknn {

/// Marker for an absent cell. Missing cells are stored as quiet NaN.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

/// Text identifiers carried alongside the numeric columns.
///
/// `position` is the index among the numeric columns before which the id
/// column appeared in the source header, so CSV output restores the
/// original header order.
struct IdColumn {
    std::string name;
    std::size_t position = 0;
    std::vector<std::string> values;

    bool operator==(const IdColumn&) const = default;
};

/// Immutable rectangular table: one row per subject, named numeric columns,
/// one designated target column.
///
/// Every operation that "changes" a frame returns a new one. The
/// constructor enforces the invariants: rectangular rows, unique labels,
/// target present, one id per row when ids are attached.
class Frame {
public:
    using Row = std::vector<double>;

    Frame(std::vector<std::string> column_names,
          std::vector<Row> rows,
          std::string target_name,
          std::optional<IdColumn> ids = std::nullopt);

    const std::vector<std::string>& column_names() const noexcept { return columns_; }
    const std::string& target_name() const noexcept { return target_; }
    std::size_t target_index() const noexcept { return target_index_; }

    std::size_t num_rows() const noexcept { return rows_.size(); }
    std::size_t num_columns() const noexcept { return columns_.size(); }
    bool empty() const noexcept { return rows_.empty(); }

    const std::vector<Row>& rows() const noexcept { return rows_; }
    const Row& row(std::size_t i) const { return rows_.at(i); }
    double at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

    std::optional<std::size_t> find_column(const std::string& name) const;
    /// Index of `name`; throws UnknownColumn.
    std::size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const { return find_column(name).has_value(); }

    std::vector<double> column(const std::string& name) const;
    std::vector<double> column(std::size_t index) const;
    std::vector<double> targets() const { return column(target_index_); }

    /// Every label except the target, in frame order.
    std::vector<std::string> feature_names() const;

    const std::optional<IdColumn>& ids() const noexcept { return ids_; }
    std::optional<std::string> row_id(std::size_t i) const;

    Frame select_rows(std::span<const std::size_t> indices) const;
    /// Exactly `names`, in that order; the target must be among them.
    Frame select_columns(const std::vector<std::string>& names) const;
    Frame without_columns(const std::vector<std::string>& names) const;
    Frame with_column(const std::string& name, std::vector<double> values) const;
    /// Same shape, different cells (row count and width must match).
    Frame with_rows(std::vector<Row> rows) const;

    /// Cell-for-cell equality; two missing cells compare equal.
    bool operator==(const Frame& other) const;

private:
    std::vector<std::string> columns_;
    std::vector<Row> rows_;
    std::string target_;
    std::size_t target_index_ = 0;
    std::optional<IdColumn> ids_;
};

} // namespace ammknn
