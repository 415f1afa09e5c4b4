#include "ammknn/frame.hpp"

#include "ammknn/error.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_set>

namespace ammknn {

Frame::Frame(std::vector<std::string> column_names,
             std::vector<Row> rows,
             std::string target_name,
             std::optional<IdColumn> ids)
    : columns_(std::move(column_names)),
      rows_(std::move(rows)),
      target_(std::move(target_name)),
      ids_(std::move(ids)) {
    std::unordered_set<std::string> seen;
    for (const auto& name : columns_) {
        if (!seen.insert(name).second)
            throw Error(ErrorCode::DuplicateColumnName, "column '" + name + "' appears twice");
    }
    if (ids_ && seen.contains(ids_->name))
        throw Error(ErrorCode::DuplicateColumnName, "id column '" + ids_->name + "' is also numeric");

    auto it = std::find(columns_.begin(), columns_.end(), target_);
    if (it == columns_.end())
        throw Error(ErrorCode::UnknownTargetColumn, "target '" + target_ + "' is not a column");
    target_index_ = static_cast<std::size_t>(it - columns_.begin());

    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].size() != columns_.size())
            throw Error(ErrorCode::InvariantViolation,
                        "row " + std::to_string(i) + " has " + std::to_string(rows_[i].size()) +
                            " cells, expected " + std::to_string(columns_.size()));
    }
    if (ids_) {
        if (ids_->values.size() != rows_.size())
            throw Error(ErrorCode::InvariantViolation, "id count does not match row count");
        ids_->position = std::min(ids_->position, columns_.size());
    }
}

std::optional<std::size_t> Frame::find_column(const std::string& name) const {
    auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

std::size_t Frame::column_index(const std::string& name) const {
    if (auto idx = find_column(name)) return *idx;
    throw Error(ErrorCode::UnknownColumn, "no column named '" + name + "'");
}

std::vector<double> Frame::column(const std::string& name) const {
    return column(column_index(name));
}

std::vector<double> Frame::column(std::size_t index) const {
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.at(index));
    return out;
}

std::vector<std::string> Frame::feature_names() const {
    std::vector<std::string> out;
    out.reserve(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j)
        if (j != target_index_) out.push_back(columns_[j]);
    return out;
}

std::optional<std::string> Frame::row_id(std::size_t i) const {
    if (!ids_) return std::nullopt;
    return ids_->values.at(i);
}

Frame Frame::select_rows(std::span<const std::size_t> indices) const {
    std::vector<Row> rows;
    rows.reserve(indices.size());
    std::optional<IdColumn> ids;
    if (ids_) ids = IdColumn{ids_->name, ids_->position, {}};
    for (auto i : indices) {
        rows.push_back(rows_.at(i));
        if (ids) ids->values.push_back(ids_->values.at(i));
    }
    return Frame(columns_, std::move(rows), target_, std::move(ids));
}

Frame Frame::select_columns(const std::vector<std::string>& names) const {
    std::vector<std::size_t> idx;
    idx.reserve(names.size());
    for (const auto& n : names) idx.push_back(column_index(n));

    std::vector<Row> rows;
    rows.reserve(rows_.size());
    for (const auto& r : rows_) {
        Row out;
        out.reserve(idx.size());
        for (auto j : idx) out.push_back(r[j]);
        rows.push_back(std::move(out));
    }

    std::optional<IdColumn> ids = ids_;
    if (ids) {
        // Keep the id next to the first surviving column that preceded it.
        std::size_t pos = 0;
        for (auto j : idx)
            if (j < ids_->position) ++pos;
        ids->position = pos;
    }
    return Frame(names, std::move(rows), target_, std::move(ids));
}

Frame Frame::without_columns(const std::vector<std::string>& names) const {
    for (const auto& n : names) column_index(n);
    std::vector<std::string> keep;
    for (const auto& c : columns_)
        if (std::find(names.begin(), names.end(), c) == names.end()) keep.push_back(c);
    return select_columns(keep);
}

Frame Frame::with_column(const std::string& name, std::vector<double> values) const {
    if (has_column(name) || (ids_ && ids_->name == name))
        throw Error(ErrorCode::NameCollision, "column '" + name + "' already exists");
    if (values.size() != rows_.size())
        throw Error(ErrorCode::LengthMismatch, "new column '" + name + "' has wrong length");
    auto columns = columns_;
    columns.push_back(name);
    auto rows = rows_;
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].push_back(values[i]);
    return Frame(std::move(columns), std::move(rows), target_, ids_);
}

Frame Frame::with_rows(std::vector<Row> rows) const {
    if (rows.size() != rows_.size())
        throw Error(ErrorCode::InvariantViolation, "with_rows changes the row count");
    return Frame(columns_, std::move(rows), target_, ids_);
}

bool Frame::operator==(const Frame& other) const {
    if (columns_ != other.columns_ || target_ != other.target_ || ids_ != other.ids_) return false;
    if (rows_.size() != other.rows_.size()) return false;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            const double a = rows_[i][j];
            const double b = other.rows_[i][j];
            if (is_missing(a) && is_missing(b)) continue;
            if (std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(b)) return false;
        }
    }
    return true;
}

} // namespace ammknn
