#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bsdp/ops.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

/// One environment step plus the bootstrap mask deciding which ensemble
/// members may train on it.
struct MaskedTransition {
  Vec state;
  int action = 0;
  double reward = 0.0;
  Vec next_state;
  bool terminal = false;
  std::vector<std::uint8_t> mask;
};

/// K independent Bernoulli(p) bits.
inline std::vector<std::uint8_t> sample_mask(int k, double p, Rng& rng) {
  if (k < 1) throw std::invalid_argument("sample_mask: k < 1");
  if (p < 0.0 || p > 1.0)
    throw std::invalid_argument("sample_mask: p outside [0, 1]");
  std::vector<std::uint8_t> mask(k);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& bit : mask) bit = dist(rng) < p ? 1 : 0;
  return mask;
}

struct SampleBatch {
  std::vector<MaskedTransition> transitions;
  std::vector<std::uint64_t> ids;  // insertion ids, parallel to transitions
};

/// Bounded FIFO transition store. Sampling for member k draws uniformly with
/// replacement from exactly the transitions whose mask bit k is set.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int ensemble_size)
      : capacity_(capacity),
        ensemble_size_(ensemble_size),
        eligible_count_(ensemble_size, 0) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity 0");
    if (ensemble_size < 1)
      throw std::invalid_argument("ReplayBuffer: ensemble size < 1");
    slots_.reserve(capacity);
    ids_.reserve(capacity);
  }

  std::size_t size() const { return slots_.size(); }
  std::size_t capacity() const { return capacity_; }
  int ensemble_size() const { return ensemble_size_; }
  std::uint64_t total_pushed() const { return pushed_; }

  /// Index 0 is the oldest stored transition.
  const MaskedTransition& at(std::size_t i) const {
    return slots_[physical(i)];
  }
  std::uint64_t id_at(std::size_t i) const { return ids_[physical(i)]; }

  std::uint64_t push(MaskedTransition t) {
    if (t.mask.size() != static_cast<std::size_t>(ensemble_size_))
      throw std::invalid_argument("ReplayBuffer::push: mask length mismatch");
    const std::uint64_t id = pushed_++;
    if (slots_.size() < capacity_) {
      slots_.push_back(std::move(t));
      ids_.push_back(id);
      count_mask(slots_.back().mask, +1);
    } else {
      count_mask(slots_[write_].mask, -1);
      count_mask(t.mask, +1);
      slots_[write_] = std::move(t);
      ids_[write_] = id;
      write_ = (write_ + 1) % capacity_;
    }
    return id;
  }

  /// Empty result means no stored transition is eligible for this member.
  std::optional<SampleBatch> sample_for_member(int member, int batch_size,
                                               Rng& rng) const {
    if (member < 0 || member >= ensemble_size_)
      throw std::invalid_argument("sample_for_member: bad member index");
    if (batch_size < 1)
      throw std::invalid_argument("sample_for_member: batch_size < 1");
    if (eligible_count_[member] == 0) return std::nullopt;
    SampleBatch batch;
    batch.transitions.reserve(batch_size);
    batch.ids.reserve(batch_size);
    std::uniform_int_distribution<std::size_t> dist(0, slots_.size() - 1);
    // Rejection sampling is uniform over the eligible subset; the per-member
    // eligible counter guarantees termination.
    for (int i = 0; i < batch_size; ++i) {
      std::size_t slot;
      do {
        slot = dist(rng);
      } while (!slots_[slot].mask[member]);
      batch.transitions.push_back(slots_[slot]);
      batch.ids.push_back(ids_[slot]);
    }
    return batch;
  }

 private:
  std::size_t physical(std::size_t logical) const {
    if (slots_.size() < capacity_) return logical;  // not wrapped yet
    return (write_ + logical) % capacity_;
  }

  void count_mask(const std::vector<std::uint8_t>& mask, int delta) {
    for (int k = 0; k < ensemble_size_; ++k)
      if (mask[k]) eligible_count_[k] += delta;
  }

  std::size_t capacity_;
  int ensemble_size_;
  std::vector<MaskedTransition> slots_;
  std::vector<std::uint64_t> ids_;
  std::size_t write_ = 0;  // next slot to overwrite once full
  std::uint64_t pushed_ = 0;
  std::vector<long> eligible_count_;
};

}  // namespace bsdp
