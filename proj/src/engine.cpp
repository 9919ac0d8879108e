#include "chronicle/engine.hpp"

namespace chronicle {

Engine::Engine(std::shared_ptr<const Store> store, unsigned threads)
    : indexes_(std::make_shared<IndexSet>(std::move(store))),
      catalog_(std::make_shared<AttributeCatalog>(indexes_->store())),
      threads_(threads) {
  unfiltered_ = std::make_shared<Snapshot>(0, indexes_, catalog_, std::make_shared<PassMask>(), std::nullopt);
  current_ = unfiltered_;
}

std::shared_ptr<const Snapshot> Engine::current() const {
  std::lock_guard lock(current_mutex_);
  return current_;
}

void Engine::publish(std::shared_ptr<const Snapshot> snapshot) {
  std::lock_guard lock(current_mutex_);
  current_ = std::move(snapshot);
}

std::uint64_t Engine::apply_filter(const FilterExpr& expr) {
  CompiledFilter compiled(expr, *catalog_);
  std::lock_guard rebuild(rebuild_mutex_);
  auto mask = std::make_shared<PassMask>(PassMask::build(indexes_->store(), compiled, threads_));
  const std::uint64_t id = next_id_++;
  publish(std::make_shared<Snapshot>(id, indexes_, catalog_, std::move(mask), expr));
  return id;
}

std::uint64_t Engine::clear_filter() {
  std::lock_guard rebuild(rebuild_mutex_);
  publish(unfiltered_);
  return unfiltered_->id();
}

}  // namespace chronicle
