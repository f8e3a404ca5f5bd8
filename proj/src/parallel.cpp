#include "vpralign/parallel.hpp"

namespace vpralign {

namespace {
std::atomic<std::size_t> configured_workers{0};
}

void set_worker_count(std::size_t workers) { configured_workers.store(workers); }

std::size_t worker_count() {
  const std::size_t configured = configured_workers.load();
  if (configured != 0) return configured;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace vpralign
