#include "jnr/stnet/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace jnr::stnet {

std::size_t element_count(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

Tensor::Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)), data(element_count(shape), 0.0) {}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

}  // namespace jnr::stnet
