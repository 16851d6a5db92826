#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <string_view>

namespace philap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using ConstVecRef = Eigen::Ref<const Eigen::VectorXd>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Derives a child seed from a base seed and a tag, so that every probe or
// sampler owns an independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

}  // namespace philap
