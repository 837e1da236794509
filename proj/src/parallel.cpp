// Copyright 2026 The Brushwork Authors
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

#include "brushwork/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace brushwork {
namespace {
std::atomic<int> g_threads{1};
}  // namespace

void set_thread_count(int threads) { g_threads = std::max(1, threads); }

int thread_count() { return g_threads.load(); }

void parallel_rows(int begin, int end, const std::function<void(int)>& body) {
  const int threads = thread_count();
#if defined(_OPENMP)
  if (threads > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
    for (int row = begin; row < end; ++row) body(row);
    return;
  }
#endif
  for (int row = begin; row < end; ++row) body(row);
}

}  // namespace brushwork
