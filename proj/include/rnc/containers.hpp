#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rnc/ops.hpp"

namespace rnc {

/// Binary search tree keyed by encoded values. Ordering and equality use
/// less_than/eq_enc only, so lookups work for any shifted encoding of a key
/// and nothing is ever decoded. Unbalanced by design; inserting a duplicate
/// canonical key replaces the payload. Single writer, concurrent readers
/// after construction.
template <typename Payload>
class RncTree {
 public:
  explicit RncTree(const ModuliSet& ms) : ms_(&ms) {}

  void insert(const EncodedValue& key, Payload payload) {
    require_bound(*ms_, key);
    std::unique_ptr<Node>* slot = &root_;
    while (*slot != nullptr) {
      Node& node = **slot;
      ++comparisons_;
      if (less_than(*ms_, key, node.key)) {
        slot = &node.left;
        continue;
      }
      ++comparisons_;
      if (less_than(*ms_, node.key, key)) {
        slot = &node.right;
        continue;
      }
      node.payload = std::move(payload);
      return;
    }
    *slot = std::make_unique<Node>(Node{key, std::move(payload), {}, {}});
    ++size_;
  }

  const Payload* get(const EncodedValue& key) const {
    require_bound(*ms_, key);
    const Node* node = root_.get();
    while (node != nullptr) {
      ++comparisons_;
      if (less_than(*ms_, key, node->key)) {
        node = node->left.get();
        continue;
      }
      ++comparisons_;
      if (less_than(*ms_, node->key, key)) {
        node = node->right.get();
        continue;
      }
      return &node->payload;
    }
    return nullptr;
  }

  std::size_t size() const noexcept { return size_; }

  std::uint64_t comparisons() const noexcept { return comparisons_; }
  void reset_comparisons() noexcept { comparisons_ = 0; }

 private:
  struct Node {
    EncodedValue key;
    Payload payload;
    std::unique_ptr<Node> left;
    std::unique_ptr<Node> right;
  };

  const ModuliSet* ms_;
  std::unique_ptr<Node> root_;
  std::size_t size_ = 0;
  mutable std::uint64_t comparisons_ = 0;
};

/// Dense u-dimensional array with one cell per canonical value: the entry
/// for v lives at (v mod m_0, ..., v mod m_{u-1}). Lookup canonicalizes the
/// key's components and touches exactly one cell.
template <typename Payload>
class RncGrid {
 public:
  // Cell count equals the dynamic range; refuse absurd allocations.
  static constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 26;

  explicit RncGrid(const ModuliSet& ms) : ms_(&ms) {
    if (ms.dynamic_range() > kMaxCells) {
      throw OutOfRangeError("grid would need too many cells");
    }
    cells_.resize(static_cast<std::size_t>(ms.dynamic_range()));
  }

  void put(const EncodedValue& key, Payload payload) {
    cells_[flat_index(key)] = std::move(payload);
  }

  const Payload* get(const EncodedValue& key) const {
    const auto& cell = cells_[flat_index(key)];
    return cell.has_value() ? &*cell : nullptr;
  }

  std::size_t cells() const noexcept { return cells_.size(); }

 private:
  std::size_t flat_index(const EncodedValue& key) const {
    const EncodedValue canon = canonicalize(*ms_, key);
    std::size_t index = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < ms_->count(); ++i) {
      index += static_cast<std::size_t>(canon.components[i]) * stride;
      stride *= static_cast<std::size_t>(ms_->modulus(i));
    }
    return index;
  }

  const ModuliSet* ms_;
  std::vector<std::optional<Payload>> cells_;
};

/// Grid preloaded from a table: entry i is keyed by encode(i). Requires the
/// dynamic range to cover the table.
template <typename Payload>
RncGrid<Payload> grid_from_table(const ModuliSet& ms,
                                 std::span<const Payload> table) {
  if (table.size() > ms.dynamic_range()) {
    throw OutOfRangeError("table does not fit the dynamic range");
  }
  RncGrid<Payload> grid(ms);
  for (std::size_t i = 0; i < table.size(); ++i) {
    grid.put(encode(ms, i), table[i]);
  }
  return grid;
}

/// Linear-scan association list with the same encoded-key contract as
/// RncTree. Baseline for lookup-cost comparisons.
template <typename Payload>
class RncLinearMap {
 public:
  explicit RncLinearMap(const ModuliSet& ms) : ms_(&ms) {}

  void insert(const EncodedValue& key, Payload payload) {
    for (auto& [k, p] : entries_) {
      ++comparisons_;
      if (eq_enc(*ms_, key, k)) {
        p = std::move(payload);
        return;
      }
    }
    entries_.emplace_back(key, std::move(payload));
  }

  const Payload* get(const EncodedValue& key) const {
    for (const auto& [k, p] : entries_) {
      ++comparisons_;
      if (eq_enc(*ms_, key, k)) return &p;
    }
    return nullptr;
  }

  std::uint64_t comparisons() const noexcept { return comparisons_; }
  void reset_comparisons() noexcept { comparisons_ = 0; }

 private:
  const ModuliSet* ms_;
  std::vector<std::pair<EncodedValue, Payload>> entries_;
  mutable std::uint64_t comparisons_ = 0;
};

}  // namespace rnc
