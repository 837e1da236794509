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

#pragma once

#include <functional>

namespace brushwork {

/// Worker count used by the row-parallel loops. Results never depend on it:
/// every loop writes disjoint rows and reductions run serially afterwards.
void set_thread_count(int threads);
int thread_count();

/// Runs body(row) for row in [begin, end).
void parallel_rows(int begin, int end, const std::function<void(int)>& body);

}  // namespace brushwork
