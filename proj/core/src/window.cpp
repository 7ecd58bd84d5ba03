#include "dbf/window.hpp"

#include <algorithm>

#include "dbf/errors.hpp"

namespace dbf {

WindowView build_window(const JobQueue& queue, const WindowConfig& config, double now) {
  if (config.head < 0 || config.tail < 0 || config.size() < 1)
    throw ConfigError("window", "head and tail must be >= 0 and sum to >= 1");

  WindowView view(static_cast<std::size_t>(config.size()));
  std::size_t L = queue.size();
  std::size_t head_count = std::min<std::size_t>(L, static_cast<std::size_t>(config.head));

  auto fill = [&](std::size_t slot, std::size_t qi) {
    const Job& j = queue.at(qi);
    view.set(slot, WindowSlot{qi, j.cores, j.runtime, j.wait_at(now)});
  };

  for (std::size_t i = 0; i < head_count; ++i) fill(i, i);

  // Tail slots grab the deepest remaining positions, presented shallow to
  // deep so the slot order mirrors the queue order.
  std::size_t tail_count =
      std::min<std::size_t>(static_cast<std::size_t>(config.tail), L - head_count);
  for (std::size_t k = 0; k < tail_count; ++k) {
    std::size_t qi = L - tail_count + k;
    fill(static_cast<std::size_t>(config.head) + k, qi);
  }
  return view;
}

}  // namespace dbf
