// Copyright 2026 The Authors.
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

#ifndef ADSEED_PARALLEL_H_
#define ADSEED_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace adseed {

// Worker count: ADSEED_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int WorkerCount();

// Runs body(i) for i in [0, n) on up to WorkerCount() threads. Callers write
// results into per-index slots and reduce them in index order afterwards, so
// the outcome never depends on scheduling. The first exception thrown by any
// body is rethrown on the calling thread.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace adseed

#endif  // ADSEED_PARALLEL_H_
