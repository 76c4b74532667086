// Copyright 2026 The vcforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vcforge/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace vc::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(VCFORGE_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend startup_backend() {
  const char* env = std::getenv("VCFORGE_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0) {
      if (!cpu_has_avx2()) {
        throw std::runtime_error(
            "VCFORGE_KERNELS=avx2 but AVX2 is unavailable on this machine");
      }
      return Backend::kAvx2;
    }
    // "auto" or anything else falls through to the probe.
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<int>& backend_slot() {
  static std::atomic<int> slot{static_cast<int>(startup_backend())};
  return slot;
}

}  // namespace

bool avx2_available() { return cpu_has_avx2(); }

#if !defined(VCFORGE_HAVE_AVX2)
const Ops& avx2_ops() {
  throw std::runtime_error("AVX2 kernels not compiled into this build");
}
#endif

const Ops& active() {
  return active_backend() == Backend::kAvx2 ? avx2_ops() : scalar_ops();
}

Backend active_backend() {
  return static_cast<Backend>(backend_slot().load(std::memory_order_relaxed));
}

void force_backend(Backend backend) {
  if (backend == Backend::kAvx2 && !cpu_has_avx2()) {
    throw std::runtime_error("cannot force AVX2 kernels: unavailable");
  }
  backend_slot().store(static_cast<int>(backend), std::memory_order_relaxed);
}

void reset_backend() {
  backend_slot().store(static_cast<int>(startup_backend()),
                       std::memory_order_relaxed);
}

}  // namespace vc::kernels
