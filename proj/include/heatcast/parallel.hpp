// Copyright 2026 The Heatcast Authors
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

#ifndef HEATCAST_PARALLEL_HPP_
#define HEATCAST_PARALLEL_HPP_

#ifdef _OPENMP
#include <omp.h>
#endif

namespace heatcast
{

// Thin wrappers so callers build unchanged without OpenMP.
//
// Every parallel loop in this library is either purely per-element or reduces
// through fixed-order partials (per row / per block, combined serially in
// index order), so results are bit-identical for any thread count.

inline int max_threads()
{
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n)
{
#ifdef _OPENMP
  omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace heatcast

#endif  // HEATCAST_PARALLEL_HPP_
