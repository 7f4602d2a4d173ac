#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace cpofdm {

// Dense (receiver, transmitter, cell) array, row-major.
template <typename T>
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(std::size_t d0, std::size_t d1, std::size_t d2, T fill = T{})
        : d0_(d0), d1_(d1), d2_(d2), data_(d0 * d1 * d2, fill) {}

    std::size_t dim0() const { return d0_; }
    std::size_t dim1() const { return d1_; }
    std::size_t dim2() const { return d2_; }
    std::size_t size() const { return data_.size(); }

    T& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }
    const T& operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[index(i, j, k)]; }

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    bool operator==(const Tensor3&) const = default;

private:
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        if (i >= d0_ || j >= d1_ || k >= d2_) throw std::out_of_range("Tensor3 index out of range");
        return (i * d1_ + j) * d2_ + k;
    }

    std::size_t d0_ = 0, d1_ = 0, d2_ = 0;
    std::vector<T> data_;
};

}  // namespace cpofdm
