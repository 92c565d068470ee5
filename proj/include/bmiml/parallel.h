// Copyright 2026 The BMIML Authors. All Rights Reserved.
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

#ifndef BMIML_PARALLEL_H_
#define BMIML_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace bmiml {

// Upper bound on worker threads; 0 means hardware concurrency. Results never
// depend on this value since every index writes only its own output slot.
void set_max_threads(unsigned n);
unsigned max_threads();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bmiml

#endif  // BMIML_PARALLEL_H_
