#include "omniselect/tensor.hpp"

#include <limits>
#include <string>

namespace omniselect {

std::size_t Tensor::element_count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t extent : shape) {
        if (extent != 0 && n > std::numeric_limits<std::size_t>::max() / extent) {
            throw ValidationError("tensor shape overflows element count");
        }
        n *= extent;
    }
    return n;
}

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(element_count(shape_), 0.0f) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_)) {
        throw ValidationError("tensor data length " + std::to_string(data_.size()) +
                              " does not match shape product " +
                              std::to_string(element_count(shape_)));
    }
}

std::size_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size()) {
        throw ValidationError("tensor axis out of range");
    }
    return shape_[axis];
}

std::size_t Tensor::rows() const {
    if (rank() != 2) throw ValidationError("expected a rank-2 tensor");
    return shape_[0];
}

std::size_t Tensor::cols() const {
    if (rank() != 2) throw ValidationError("expected a rank-2 tensor");
    return shape_[1];
}

std::span<const float> Tensor::row(std::size_t r) const {
    if (r >= rows()) throw ValidationError("row index out of range");
    return {data_.data() + r * cols(), cols()};
}

MatrixView Tensor::view() const {
    return {data_.data(), rows(), cols()};
}

MatrixView Tensor::row_block(std::size_t first, std::size_t count) const {
    if (first + count > rows()) throw ValidationError("row block out of range");
    return {data_.data() + first * cols(), count, cols()};
}

} // namespace omniselect
