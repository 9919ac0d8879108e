#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>

#include "chronicle/attributes.hpp"
#include "chronicle/filter.hpp"
#include "chronicle/index.hpp"
#include "chronicle/query.hpp"

namespace chronicle {

/// Immutable query state: shared trees and catalog plus an optional filter
/// mask. Snapshot 0 is the unfiltered one.
class Snapshot {
 public:
  Snapshot(std::uint64_t id, std::shared_ptr<const IndexSet> indexes, std::shared_ptr<const AttributeCatalog> catalog,
           std::shared_ptr<const PassMask> pass, std::optional<FilterExpr> filter)
      : id_(id), indexes_(std::move(indexes)), catalog_(std::move(catalog)), pass_(std::move(pass)),
        filter_(std::move(filter)) {}

  std::uint64_t id() const noexcept { return id_; }
  const Store& store() const noexcept { return indexes_->store(); }
  const IndexSet& indexes() const noexcept { return *indexes_; }
  const AttributeCatalog& catalog() const noexcept { return *catalog_; }
  const PassMask& pass() const noexcept { return *pass_; }
  const std::optional<FilterExpr>& filter() const noexcept { return filter_; }
  QueryContext context(TreeOptions options) const { return {indexes_->tree(options), *catalog_, *pass_}; }

 private:
  std::uint64_t id_;
  std::shared_ptr<const IndexSet> indexes_;
  std::shared_ptr<const AttributeCatalog> catalog_;
  std::shared_ptr<const PassMask> pass_;
  std::optional<FilterExpr> filter_;
};

/// Publishes snapshots. Readers take the current snapshot under a short
/// lock and never wait for a rebuild; rebuilds run one at a time.
class Engine {
 public:
  explicit Engine(std::shared_ptr<const Store> store, unsigned threads = 1);

  std::shared_ptr<const Snapshot> current() const;
  std::shared_ptr<const Snapshot> unfiltered() const noexcept { return unfiltered_; }
  const Store& store() const noexcept { return indexes_->store(); }
  const IndexSet& indexes() const noexcept { return *indexes_; }
  const AttributeCatalog& catalog() const noexcept { return *catalog_; }

  /// Validates, builds the filtered snapshot and publishes it. Throws
  /// ValidationError before any rebuild starts.
  std::uint64_t apply_filter(const FilterExpr& expr);
  /// Publishes the unfiltered snapshot again; returns its id (0).
  std::uint64_t clear_filter();

 private:
  void publish(std::shared_ptr<const Snapshot> snapshot);

  std::shared_ptr<const IndexSet> indexes_;
  std::shared_ptr<const AttributeCatalog> catalog_;
  std::shared_ptr<const Snapshot> unfiltered_;
  unsigned threads_;

  mutable std::mutex current_mutex_;
  std::shared_ptr<const Snapshot> current_;
  std::mutex rebuild_mutex_;
  std::atomic<std::uint64_t> next_id_{1};
};

}  // namespace chronicle
