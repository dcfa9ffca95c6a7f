// declex/kernels.cc

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

#include "declex/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>

namespace declex {
namespace kernels {

using detail::OpsTable;

namespace {

std::atomic<const OpsTable*> g_ops{nullptr};
std::atomic<Backend> g_backend{Backend::kAuto};
std::once_flag g_init_once;

Backend default_backend() {
  const char* env = std::getenv("DECLEX_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0) return Backend::kAvx2;
  }
#ifdef DECLEX_HAVE_AVX2
  if (detail::avx2_available()) return Backend::kAvx2;
#endif
  return Backend::kScalar;
}

const OpsTable* table_for(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return &detail::scalar_table();
    case Backend::kAvx2:
#ifdef DECLEX_HAVE_AVX2
      if (detail::avx2_available()) return &detail::avx2_table();
#endif
      return nullptr;
    default:
      return nullptr;
  }
}

void init() {
  Backend b = default_backend();
  const OpsTable* t = table_for(b);
  if (t == nullptr) {  // env asked for an unavailable backend
    b = Backend::kScalar;
    t = table_for(b);
  }
  g_backend.store(b, std::memory_order_relaxed);
  g_ops.store(t, std::memory_order_release);
}

inline const OpsTable& ops() {
  const OpsTable* t = g_ops.load(std::memory_order_acquire);
  if (t == nullptr) {
    std::call_once(g_init_once, init);
    t = g_ops.load(std::memory_order_acquire);
  }
  return *t;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::kAuto:
      return "auto";
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "?";
}

bool backend_supported(Backend b) {
  if (b == Backend::kAuto || b == Backend::kScalar) return true;
  return table_for(b) != nullptr;
}

Backend active_backend() {
  ops();
  return g_backend.load(std::memory_order_relaxed);
}

void force_backend(Backend b) {
  ops();  // make sure init ran first
  if (b == Backend::kAuto) {
    init();
    return;
  }
  const OpsTable* t = table_for(b);
  if (t == nullptr)
    throw std::runtime_error(std::string("kernel backend not supported: ") +
                             backend_name(b));
  g_backend.store(b, std::memory_order_relaxed);
  g_ops.store(t, std::memory_order_release);
}

double sum(const double* x, std::size_t n) { return ops().sum(x, n); }

double dot(const double* x, const double* y, std::size_t n) {
  return ops().dot(x, y, n);
}

double max_value(const double* x, std::size_t n) { return ops().max_value(x, n); }

std::size_t argmax(const double* x, std::size_t n) { return ops().argmax(x, n); }

void scale(double* x, std::size_t n, double c) { ops().scale(x, n, c); }

void scale_copy(const double* x, double c, double* out, std::size_t n) {
  ops().scale_copy(x, c, out, n);
}

void mul_inplace(double* x, const double* y, std::size_t n) {
  ops().mul_inplace(x, y, n);
}

void axpby(double a, const double* x, double b, const double* y, double* out,
           std::size_t n) {
  ops().axpby(a, x, b, y, out, n);
}

std::size_t count_ge(const double* x, std::size_t n, double t) {
  return ops().count_ge(x, n, t);
}

double sum_ge(const double* x, std::size_t n, double t) {
  return ops().sum_ge(x, n, t);
}

}  // namespace kernels
}  // namespace declex
