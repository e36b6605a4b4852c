#pragma once

#include "vemhr/geometry.hpp"
#include "vemhr/material.hpp"

#include <functional>

namespace vemhr {

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;
using TensorField = std::function<SymTensor2(const Vec2&)>;

} // namespace vemhr
