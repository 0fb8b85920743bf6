#pragma once

#include <atomic>
#include <exception>
#include <thread>

namespace toolwear {

template <LogDensityTarget Target>
std::vector<RawChain> run_chains(const Target& target,
                                 const SamplerConfig& cfg) {
  cfg.validate();
  std::vector<RawChain> chains(static_cast<std::size_t>(cfg.chains));
  int n_threads = std::min(cfg.threads, cfg.chains);
  if (n_threads <= 1) {
    for (int c = 0; c < cfg.chains; ++c)
      chains[static_cast<std::size_t>(c)] = run_chain(target, cfg, c);
  } else {
    std::vector<std::exception_ptr> errors(
        static_cast<std::size_t>(cfg.chains));
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (int c = next.fetch_add(1); c < cfg.chains;
             c = next.fetch_add(1)) {
          try {
            chains[static_cast<std::size_t>(c)] = run_chain(target, cfg, c);
          } catch (...) {
            errors[static_cast<std::size_t>(c)] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return chains;
}

}  // namespace toolwear
