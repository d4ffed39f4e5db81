#pragma once

#include <array>
#include <complex>
#include <functional>
#include <mutex>
#include <span>
#include <vector>

#include "segrekin/domain.hpp"

namespace segrekin::detail {

using cvec = std::vector<std::complex<double>>;

// FFTW planning is not thread safe; every planner call goes through this lock.
std::mutex& planner_mutex();

// Unnormalised in-place DFT over the grid's layout.
void fft(const SpatialGrid& g, cvec& data, bool inverse);

cvec forward(const SpatialGrid& g, std::span<const double> values);
// Inverse transform divided by N, real part kept.
std::vector<double> inverse_real(const SpatialGrid& g, cvec data);

// Signed integer mode numbers of a flat index; Nyquist reported as +N/2.
std::array<long, 2> modes(const SpatialGrid& g, std::size_t idx);
bool is_nyquist(const SpatialGrid& g, std::size_t idx, int axis);
std::array<double, 2> wavevector(const SpatialGrid& g, std::size_t idx);
double k_squared(const SpatialGrid& g, std::size_t idx);

std::vector<double> apply_multiplier(const SpatialGrid& g, std::span<const double> values,
                                     const std::function<std::complex<double>(std::size_t)>& m);
std::vector<double> derivative(const SpatialGrid& g, std::span<const double> values, int axis);
std::vector<double> laplacian(const SpatialGrid& g, std::span<const double> values);
std::vector<double> centered_derivative(const SpatialGrid& g, std::span<const double> values, int axis);

}  // namespace segrekin::detail
