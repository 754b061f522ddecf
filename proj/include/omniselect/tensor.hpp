#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "omniselect/error.hpp"

namespace omniselect {

// Non-owning view of a contiguous block of rows inside a row-major matrix.
struct MatrixView {
    const float* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::span<const float> row(std::size_t r) const {
        return {data + r * cols, cols};
    }
    std::size_t size() const { return rows * cols; }
};

// Dense row-major float tensor, the carrier for every embedding and
// attention matrix in the engine. 32-bit float elements only.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<float> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t extent(std::size_t axis) const;
    std::size_t size() const { return data_.size(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::span<const float> values() const { return {data_.data(), data_.size()}; }

    // Rank-2 accessors; throw ValidationError on other ranks.
    std::size_t rows() const;
    std::size_t cols() const;
    std::span<const float> row(std::size_t r) const;
    MatrixView view() const;
    MatrixView row_block(std::size_t first, std::size_t count) const;

    bool operator==(const Tensor&) const = default;

    // Element count for a shape, with overflow detection.
    static std::size_t element_count(const std::vector<std::size_t>& shape);

private:
    std::vector<std::size_t> shape_;
    std::vector<float> data_;
};

} // namespace omniselect
