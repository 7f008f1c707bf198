#pragma once

#include <stdexcept>
#include <string>

namespace gradcp {

// Raised when input data cannot be used: malformed CSV, non-finite values,
// degenerate series. Configuration mistakes use std::invalid_argument.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : DataError(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

} // namespace gradcp
