#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pilotsim/rng.hpp"

namespace pilotsim::srs {

inline constexpr int kSequencesPerSymbol = 16;
inline constexpr int kSymbolsPerSubframe = 14;
inline constexpr int kSectorsPerSite = 3;

enum class Scheme { kReuse1, kReuse3, kFrCc, kFrNa };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
inline bool is_fractional(Scheme s) { return s == Scheme::kFrCc || s == Scheme::kFrNa; }

/// Sequences available with `tau` training symbols; tau must lie in [1, 14].
int pool_capacity(int tau);

/// Largest N_K that fits `n_sequences` when a fraction `beta_pr` is protected.
int max_scheduled(int n_sequences, double beta_pr);

// Sequence pool of one training region. Indices [0, protected_count) form the
// protected block, split into one contiguous partition per co-located sector;
// [protected_count, n_sequences) is the shared block.
struct SrsPool {
  int tau = 1;
  int n_sequences = kSequencesPerSymbol;
  int protected_count = 0;
  int shared_count = kSequencesPerSymbol;

  double beta_pr() const { return n_sequences ? static_cast<double>(protected_count) / n_sequences : 0.0; }
  int partition_size() const { return protected_count / kSectorsPerSite; }
  int partition_begin(int sector) const { return sector * partition_size(); }

  /// Pool whose protected block has exactly `protected_count` sequences (a multiple of 3).
  static SrsPool with_protected(int tau, int protected_count);
  /// Pool protecting a fraction of the sequences, rounded down to a multiple of 3.
  static SrsPool from_fraction(int tau, double beta_pr);
};

struct SrsAssignment {
  int n_sequences = 0;
  // Aligned with the per-BS scheduled lists.
  std::vector<std::vector<int>> sequence;
  std::vector<std::vector<char>> is_protected;

  int n_bs() const { return static_cast<int>(sequence.size()); }
};

// Users of the pilot index as (bs, slot) pairs, slot being the position in the
// BS's scheduled list.
struct Collider {
  int bs = 0;
  int slot = 0;
  friend bool operator==(const Collider&, const Collider&) = default;
  friend auto operator<=>(const Collider&, const Collider&) = default;
};

class CollisionSets {
 public:
  CollisionSets() = default;
  explicit CollisionSets(const SrsAssignment& assignment);

  /// Other-cell users of `sequence` seen from `bs`, ordered by (bs, slot).
  std::vector<Collider> at(int bs, int sequence) const;
  /// Colliders of the UE scheduled in `slot` of `bs`.
  std::vector<Collider> of_slot(int bs, int slot) const;

  int n_sequences() const { return static_cast<int>(users_.size()); }

 private:
  std::vector<std::vector<int>> sequence_;
  std::vector<std::vector<Collider>> users_;
};

using ScheduledUes = std::vector<std::vector<int>>;

/// Every BS draws its sequences uniformly without replacement from the full pool.
SrsAssignment allocate_reuse1(const SrsPool& pool, const ScheduledUes& scheduled, Rng& rng);

/// Sector s of every site draws only from partition s of floor(n_sequences / 3) indices.
SrsAssignment allocate_reuse3(const SrsPool& pool, const ScheduledUes& scheduled, Rng& rng);

/// Cell-centric priority: ascending received power at the serving BS, ties to
/// the lower UE id. Returns UE ids; the head of the list is protected first.
std::vector<int> rank_cell_centric(std::span<const int> ue_ids, std::span<const double> serving_power_db);

/// Neighbour-aware priority: descending strongest neighbour-BS power, ties to
/// the lower UE id. Returns UE ids; the head of the list is protected first.
std::vector<int> rank_neighbour_aware(std::span<const int> ue_ids, std::span<const double> neighbour_power_db);

/// Fractional reuse. In every BS the first min(partition_size, N_K) UEs of the
/// ranking draw from their sector's protected partition; the rest draw from
/// the shared block.
SrsAssignment allocate_fractional(const SrsPool& pool, const ScheduledUes& scheduled,
                                  const std::vector<std::vector<int>>& rankings, Rng& rng);

/// Reuse-1/3 or fractional allocation chosen by `scheme`. `rankings` is only
/// read for fractional schemes.
SrsAssignment allocate(Scheme scheme, const SrsPool& pool, const ScheduledUes& scheduled,
                       const std::vector<std::vector<int>>& rankings, Rng& rng);

}  // namespace pilotsim::srs
