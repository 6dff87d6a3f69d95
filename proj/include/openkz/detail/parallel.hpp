#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace openkz {

template <class F>
void parallel_for(std::size_t count, int workers, F&& f) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1,
                                                 std::max<std::size_t>(count, 1));
  std::vector<std::exception_ptr> errors(w);
  auto run_block = [&](std::size_t k) {
    const std::size_t begin = count * k / w;
    const std::size_t end = count * (k + 1) / w;
    try {
      for (std::size_t i = begin; i < end; ++i) f(i);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (w == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w - 1);
    for (std::size_t k = 1; k < w; ++k) pool.emplace_back(run_block, k);
    run_block(0);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace openkz
