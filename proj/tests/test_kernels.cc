// tests/test_kernels.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "declex/kernels.hpp"

using namespace declex;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64* rng,
                               double lo = -10.0, double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(*rng);
  return v;
}

// Sizes around the 4-lane vector width plus larger odd ones.
const std::size_t kSizes[] = {1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 63, 256, 1001};

struct BackendGuard {
  ~BackendGuard() { kernels::force_backend(kernels::Backend::kAuto); }
};

}  // namespace

TEST_CASE("scalar kernels match naive loops") {
  BackendGuard guard;
  kernels::force_backend(kernels::Backend::kScalar);
  std::mt19937_64 rng(7);
  for (std::size_t n : kSizes) {
    auto x = random_vec(n, &rng);
    auto y = random_vec(n, &rng);
    double s = 0.0, d = 0.0, m = x[0];
    std::size_t am = 0, cnt = 0;
    double sge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += x[i];
      d += x[i] * y[i];
      if (x[i] > m) {
        m = x[i];
        am = i;
      }
      if (x[i] >= 0.5) {
        ++cnt;
        sge += x[i];
      }
    }
    CHECK(kernels::sum(x.data(), n) == doctest::Approx(s).epsilon(1e-12));
    CHECK(kernels::dot(x.data(), y.data(), n) ==
          doctest::Approx(d).epsilon(1e-12));
    CHECK(kernels::max_value(x.data(), n) == m);
    CHECK(kernels::argmax(x.data(), n) == am);
    CHECK(kernels::count_ge(x.data(), n, 0.5) == cnt);
    CHECK(kernels::sum_ge(x.data(), n, 0.5) ==
          doctest::Approx(sge).epsilon(1e-12));
  }
}

TEST_CASE("simd backend agrees with the scalar reference") {
  if (!kernels::backend_supported(kernels::Backend::kAvx2)) {
    MESSAGE("avx2 not available; skipping");
    return;
  }
  BackendGuard guard;
  std::mt19937_64 rng(99);
  for (std::size_t n : kSizes) {
    auto x = random_vec(n, &rng);
    auto y = random_vec(n, &rng);

    kernels::force_backend(kernels::Backend::kScalar);
    const double sum_s = kernels::sum(x.data(), n);
    const double dot_s = kernels::dot(x.data(), y.data(), n);
    const double max_s = kernels::max_value(x.data(), n);
    const std::size_t argmax_s = kernels::argmax(x.data(), n);
    const std::size_t cnt_s = kernels::count_ge(x.data(), n, 0.25);
    const double sge_s = kernels::sum_ge(x.data(), n, 0.25);
    std::vector<double> scale_s = x;
    kernels::scale(scale_s.data(), n, 1.7);
    std::vector<double> mix_s(n);
    kernels::axpby(0.3, x.data(), 0.7, y.data(), mix_s.data(), n);

    kernels::force_backend(kernels::Backend::kAvx2);
    CHECK(kernels::active_backend() == kernels::Backend::kAvx2);
    const double tol = 1e-13 * static_cast<double>(n + 1);
    CHECK(kernels::sum(x.data(), n) == doctest::Approx(sum_s).epsilon(tol));
    CHECK(kernels::dot(x.data(), y.data(), n) ==
          doctest::Approx(dot_s).epsilon(tol));
    CHECK(kernels::max_value(x.data(), n) == max_s);
    CHECK(kernels::argmax(x.data(), n) == argmax_s);
    CHECK(kernels::count_ge(x.data(), n, 0.25) == cnt_s);
    CHECK(kernels::sum_ge(x.data(), n, 0.25) ==
          doctest::Approx(sge_s).epsilon(tol));
    std::vector<double> scale_v = x;
    kernels::scale(scale_v.data(), n, 1.7);
    std::vector<double> mix_v(n);
    kernels::axpby(0.3, x.data(), 0.7, y.data(), mix_v.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(scale_v[i] == scale_s[i]);  // elementwise ops are exact
      CHECK(mix_v[i] == mix_s[i]);
    }
  }
}

TEST_CASE("argmax returns the first of equal maxima") {
  BackendGuard guard;
  std::vector<double> x = {1.0, 3.0, 3.0, 2.0, 3.0};
  for (auto b : {kernels::Backend::kScalar, kernels::Backend::kAvx2}) {
    if (!kernels::backend_supported(b)) continue;
    kernels::force_backend(b);
    CHECK(kernels::argmax(x.data(), x.size()) == 1);
  }
}

TEST_CASE("elementwise helpers") {
  BackendGuard guard;
  for (auto b : {kernels::Backend::kScalar, kernels::Backend::kAvx2}) {
    if (!kernels::backend_supported(b)) continue;
    kernels::force_backend(b);
    std::vector<double> x = {1, 2, 3, 4, 5, 6, 7};
    std::vector<double> y = {2, 2, 2, 2, 2, 2, 2};
    std::vector<double> out(7);
    kernels::scale_copy(x.data(), 3.0, out.data(), 7);
    CHECK(out[6] == 21.0);
    kernels::mul_inplace(x.data(), y.data(), 7);
    CHECK(x[3] == 8.0);
  }
}

TEST_CASE("empty and single-element inputs") {
  BackendGuard guard;
  for (auto b : {kernels::Backend::kScalar, kernels::Backend::kAvx2}) {
    if (!kernels::backend_supported(b)) continue;
    kernels::force_backend(b);
    CHECK(kernels::sum(nullptr, 0) == 0.0);
    CHECK(kernels::count_ge(nullptr, 0, 1.0) == 0);
    double one = 42.0;
    CHECK(kernels::max_value(&one, 1) == 42.0);
    CHECK(kernels::argmax(&one, 1) == 0);
  }
}

TEST_CASE("forcing an unsupported backend throws") {
  BackendGuard guard;
  if (!kernels::backend_supported(kernels::Backend::kAvx2))
    CHECK_THROWS(kernels::force_backend(kernels::Backend::kAvx2));
  else
    CHECK_NOTHROW(kernels::force_backend(kernels::Backend::kAvx2));
}
