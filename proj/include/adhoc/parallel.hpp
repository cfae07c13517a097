// Copyright 2026 The adhoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// parallel.hpp: index-space loops with an OpenMP path and a serial path.
// Results are written by index, so both paths produce identical output.

#pragma once

#include <exception>
#include <mutex>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adhoc {

enum class Execution { serial, parallel };

/// Worker count for Execution::parallel; 0 keeps the OpenMP default.
void set_worker_count(int workers);
int worker_count();

namespace detail {
bool parallel_enabled(Execution exec);
}

/// fn(i) for i in [0, n). Exceptions from workers are rethrown (first one
/// by index order is not guaranteed; one of them is).
template <class Fn>
void parallel_for(int n, Execution exec, Fn&& fn) {
  if (n <= 0) return;
#ifdef _OPENMP
  if (detail::parallel_enabled(exec) && n > 1) {
    std::exception_ptr error;
    std::mutex mu;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  for (int i = 0; i < n; ++i) fn(i);
}

/// out[i] = fn(i).
template <class T, class Fn>
std::vector<T> parallel_map(int n, Execution exec, Fn&& fn) {
  std::vector<T> out(n > 0 ? n : 0);
  parallel_for(n, exec, [&](int i) { out[i] = fn(i); });
  return out;
}

}  // namespace adhoc
