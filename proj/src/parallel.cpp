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

#include "adhoc/parallel.hpp"

namespace adhoc {

void set_worker_count(int workers) {
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace detail {

bool parallel_enabled(Execution exec) {
#ifdef _OPENMP
  // Nested regions would oversubscribe; inner kernels run serially inside an
  // ensemble worker.
  return exec == Execution::parallel && !omp_in_parallel() && omp_get_max_threads() > 1;
#else
  (void)exec;
  return false;
#endif
}

}  // namespace detail

}  // namespace adhoc
