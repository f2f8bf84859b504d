#pragma once

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "tracegym/errors.hpp"

namespace tracegym {

/// Index structure of an even-order tensor A in C^{I_1 x...x I_M x J_1 x...x J_N}.
/// The first M modes are row modes, the last N are column modes. Flattening is
/// row-major mixed radix in both groups, which makes matricization an algebra
/// isomorphism onto row_size() x col_size() matrices.
struct Shape {
    std::vector<std::int64_t> row_dims;
    std::vector<std::int64_t> col_dims;

    Shape() = default;
    Shape(std::vector<std::int64_t> rows, std::vector<std::int64_t> cols)
        : row_dims(std::move(rows)), col_dims(std::move(cols)) {
        for (auto d : row_dims)
            if (d < 1) throw ShapeError("Shape: nonpositive row dimension");
        for (auto d : col_dims)
            if (d < 1) throw ShapeError("Shape: nonpositive column dimension");
    }

    /// Square shape (I_1..I_M; I_1..I_M), the domain of traces and spectra.
    static Shape square(std::vector<std::int64_t> dims) {
        auto copy = dims;
        return Shape(std::move(dims), std::move(copy));
    }

    std::int64_t row_size() const {
        return std::accumulate(row_dims.begin(), row_dims.end(), std::int64_t{1},
                               std::multiplies<>());
    }
    std::int64_t col_size() const {
        return std::accumulate(col_dims.begin(), col_dims.end(), std::int64_t{1},
                               std::multiplies<>());
    }

    bool is_square() const { return row_dims == col_dims; }
    bool is_cubical() const {
        if (!is_square() || row_dims.empty()) return false;
        for (auto d : row_dims)
            if (d != row_dims.front()) return false;
        return true;
    }

    bool operator==(const Shape& o) const = default;

    std::string to_string() const;
};

/// Row-major flat offset of a multi-index within dims.
std::int64_t flatten_index(const std::vector<std::int64_t>& dims,
                           const std::vector<std::int64_t>& idx);

/// Inverse of flatten_index.
std::vector<std::int64_t> unflatten_index(const std::vector<std::int64_t>& dims,
                                          std::int64_t flat);

} // namespace tracegym
