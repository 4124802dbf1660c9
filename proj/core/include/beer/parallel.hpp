// Copyright 2026 The beerlab Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace beer {

// Runs independent per-index work either inline or on a TBB arena. Callers
// must make each index write only its own output slot; results are then
// identical for every thread count.
class Executor {
 public:
  explicit Executor(std::size_t threads = 1);
  ~Executor();
  Executor(Executor&&) noexcept;
  Executor& operator=(Executor&&) noexcept;

  std::size_t threads() const noexcept { return threads_; }
  void for_each(std::size_t count, const std::function<void(std::size_t)>& fn) const;

 private:
  struct Arena;
  std::size_t threads_;
  std::unique_ptr<Arena> arena_;
};

}  // namespace beer
