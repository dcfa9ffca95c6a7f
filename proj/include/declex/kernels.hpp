// declex/kernels.hpp

// Copyright 2026  The Declex Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DECLEX_KERNELS_HPP_
#define DECLEX_KERNELS_HPP_

#include <cstddef>
#include <span>

namespace declex {
namespace kernels {

/// Arithmetic kernels used by the trellis and lexicon inner loops.
/// Every kernel has a scalar reference implementation and, on x86-64, an
/// AVX2 variant.  The backend is picked once at startup (cpuid), can be
/// forced with force_backend() or the DECLEX_KERNELS environment variable
/// ("scalar" or "avx2"), and is equivalence-tested in test_kernels.
///
/// Inputs are assumed finite; NaN propagation is unspecified.

enum class Backend {
  kAuto = 0,
  kScalar,
  kAvx2,
};

const char* backend_name(Backend b);
bool backend_supported(Backend b);

/// Backend currently routing the kernels (never kAuto).
Backend active_backend();

/// Force a specific backend. Throws std::runtime_error if unsupported on
/// this machine. kAuto restores the default choice.
void force_backend(Backend b);

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);

/// Maximum of x[0..n); n must be >= 1.
double max_value(const double* x, std::size_t n);
/// Index of the first maximal element; n must be >= 1.
std::size_t argmax(const double* x, std::size_t n);

/// x[i] *= c
void scale(double* x, std::size_t n, double c);
/// out[i] = c * x[i]
void scale_copy(const double* x, double c, double* out, std::size_t n);
/// x[i] *= y[i]
void mul_inplace(double* x, const double* y, std::size_t n);
/// out[i] = a*x[i] + b*y[i]
void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n);

/// Number of elements >= t.
std::size_t count_ge(const double* x, std::size_t n, double t);
/// Sum of elements >= t.
double sum_ge(const double* x, std::size_t n, double t);

// span conveniences
inline double sum(std::span<const double> x) { return sum(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return dot(x.data(), y.data(), x.size());
}
inline double max_value(std::span<const double> x) {
  return max_value(x.data(), x.size());
}
inline std::size_t argmax(std::span<const double> x) {
  return argmax(x.data(), x.size());
}
inline void scale(std::span<double> x, double c) { scale(x.data(), x.size(), c); }
inline void mul_inplace(std::span<double> x, std::span<const double> y) {
  mul_inplace(x.data(), y.data(), x.size());
}
inline std::size_t count_ge(std::span<const double> x, double t) {
  return count_ge(x.data(), x.size(), t);
}
inline double sum_ge(std::span<const double> x, double t) {
  return sum_ge(x.data(), x.size(), t);
}

namespace detail {

// One function-pointer slot per kernel; each backend fills a table.
struct OpsTable {
  double (*sum)(const double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*max_value)(const double*, std::size_t);
  std::size_t (*argmax)(const double*, std::size_t);
  void (*scale)(double*, std::size_t, double);
  void (*scale_copy)(const double*, double, double*, std::size_t);
  void (*mul_inplace)(double*, const double*, std::size_t);
  void (*axpby)(double, const double*, double, const double*, double*,
                std::size_t);
  std::size_t (*count_ge)(const double*, std::size_t, double);
  double (*sum_ge)(const double*, std::size_t, double);
};

const OpsTable& scalar_table();
#ifdef DECLEX_HAVE_AVX2
const OpsTable& avx2_table();
bool avx2_available();
#endif

}  // namespace detail

}  // namespace kernels
}  // namespace declex

#endif  // DECLEX_KERNELS_HPP_
