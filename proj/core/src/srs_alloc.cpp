#include "pilotsim/srs_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <boost/random/uniform_int_distribution.hpp>

namespace pilotsim::srs {
namespace {

// k distinct indices drawn uniformly from [begin, begin + n), in draw order.
std::vector<int> sample_without_replacement(int begin, int n, int k, Rng& rng) {
  if (k > n) throw std::logic_error("sample_without_replacement: k > n");
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), begin);
  for (int i = 0; i < k; ++i) {
    boost::random::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

std::string budget_message(int bs, int n_k, int available, std::string_view what) {
  return "budget: BS " + std::to_string(bs) + " schedules N_K=" + std::to_string(n_k) + " but only " +
         std::to_string(available) + " " + std::string(what) + " sequences are available";
}

std::vector<int> rank_by(std::span<const int> ue_ids, std::span<const double> power_db, bool descending) {
  if (ue_ids.size() != power_db.size()) throw std::invalid_argument("rank: ue_ids and powers differ in length");
  std::vector<std::size_t> order(ue_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (power_db[a] != power_db[b]) return descending ? power_db[a] > power_db[b] : power_db[a] < power_db[b];
    return ue_ids[a] < ue_ids[b];
  });
  std::vector<int> ranked;
  ranked.reserve(order.size());
  for (auto i : order) ranked.push_back(ue_ids[i]);
  return ranked;
}

}  // namespace

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::kReuse1: return "reuse1";
    case Scheme::kReuse3: return "reuse3";
    case Scheme::kFrCc: return "fr-cc";
    case Scheme::kFrNa: return "fr-na";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (auto s : {Scheme::kReuse1, Scheme::kReuse3, Scheme::kFrCc, Scheme::kFrNa})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

int pool_capacity(int tau) {
  if (tau < 1 || tau > kSymbolsPerSubframe)
    throw std::out_of_range("pool_capacity: tau=" + std::to_string(tau) + " outside [1, " +
                            std::to_string(kSymbolsPerSubframe) + "]");
  return kSequencesPerSymbol * tau;
}

int max_scheduled(int n_sequences, double beta_pr) {
  if (beta_pr < 0.0 || beta_pr > 1.0) throw std::invalid_argument("max_scheduled: beta_pr outside [0, 1]");
  // Tolerate the rounding of n / (1 + 2 beta) landing just below an integer.
  const double cap = static_cast<double>(n_sequences) / (3.0 * beta_pr + (1.0 - beta_pr));
  return static_cast<int>(std::floor(cap + 1e-9));
}

SrsPool SrsPool::with_protected(int tau, int protected_count) {
  SrsPool pool;
  pool.tau = tau;
  pool.n_sequences = pool_capacity(tau);
  if (protected_count < 0 || protected_count > pool.n_sequences || protected_count % kSectorsPerSite != 0)
    throw std::invalid_argument("SrsPool: protected block of " + std::to_string(protected_count) +
                                " sequences must be a multiple of 3 within [0, " +
                                std::to_string(pool.n_sequences) + "]");
  pool.protected_count = protected_count;
  pool.shared_count = pool.n_sequences - protected_count;
  return pool;
}

SrsPool SrsPool::from_fraction(int tau, double beta_pr) {
  if (beta_pr < 0.0 || beta_pr > 1.0) throw std::invalid_argument("SrsPool: beta_pr outside [0, 1]");
  const int n = pool_capacity(tau);
  const int raw = static_cast<int>(std::floor(beta_pr * n + 1e-9));
  return with_protected(tau, raw - raw % kSectorsPerSite);
}

CollisionSets::CollisionSets(const SrsAssignment& assignment)
    : sequence_(assignment.sequence), users_(static_cast<std::size_t>(assignment.n_sequences)) {
  for (int b = 0; b < assignment.n_bs(); ++b) {
    const auto& seqs = assignment.sequence[b];
    for (int k = 0; k < static_cast<int>(seqs.size()); ++k) {
      const int p = seqs[k];
      if (p < 0 || p >= assignment.n_sequences) throw std::out_of_range("CollisionSets: sequence index out of range");
      users_[p].push_back({b, k});
    }
  }
}

std::vector<Collider> CollisionSets::at(int bs, int sequence) const {
  std::vector<Collider> out;
  for (const auto& c : users_.at(static_cast<std::size_t>(sequence)))
    if (c.bs != bs) out.push_back(c);
  return out;
}

std::vector<Collider> CollisionSets::of_slot(int bs, int slot) const {
  return at(bs, sequence_.at(static_cast<std::size_t>(bs)).at(static_cast<std::size_t>(slot)));
}

SrsAssignment allocate_reuse1(const SrsPool& pool, const ScheduledUes& scheduled, Rng& rng) {
  SrsAssignment a;
  a.n_sequences = pool.n_sequences;
  for (std::size_t b = 0; b < scheduled.size(); ++b) {
    const int n_k = static_cast<int>(scheduled[b].size());
    if (n_k > pool.n_sequences)
      throw std::invalid_argument(budget_message(static_cast<int>(b), n_k, pool.n_sequences, "pool"));
    a.sequence.push_back(sample_without_replacement(0, pool.n_sequences, n_k, rng));
    a.is_protected.emplace_back(static_cast<std::size_t>(n_k), char{0});
  }
  return a;
}

SrsAssignment allocate_reuse3(const SrsPool& pool, const ScheduledUes& scheduled, Rng& rng) {
  SrsAssignment a;
  a.n_sequences = pool.n_sequences;
  const int part = pool.n_sequences / kSectorsPerSite;
  for (std::size_t b = 0; b < scheduled.size(); ++b) {
    const int n_k = static_cast<int>(scheduled[b].size());
    if (n_k > part) throw std::invalid_argument(budget_message(static_cast<int>(b), n_k, part, "per-sector"));
    const int sector = static_cast<int>(b) % kSectorsPerSite;
    a.sequence.push_back(sample_without_replacement(sector * part, part, n_k, rng));
    a.is_protected.emplace_back(static_cast<std::size_t>(n_k), char{1});
  }
  return a;
}

std::vector<int> rank_cell_centric(std::span<const int> ue_ids, std::span<const double> serving_power_db) {
  return rank_by(ue_ids, serving_power_db, false);
}

std::vector<int> rank_neighbour_aware(std::span<const int> ue_ids, std::span<const double> neighbour_power_db) {
  return rank_by(ue_ids, neighbour_power_db, true);
}

SrsAssignment allocate_fractional(const SrsPool& pool, const ScheduledUes& scheduled,
                                  const std::vector<std::vector<int>>& rankings, Rng& rng) {
  if (rankings.size() != scheduled.size())
    throw std::invalid_argument("allocate_fractional: one ranking per BS required");

  SrsAssignment a;
  a.n_sequences = pool.n_sequences;
  const int part = pool.partition_size();
  for (std::size_t b = 0; b < scheduled.size(); ++b) {
    const auto& ues = scheduled[b];
    const auto& rank = rankings[b];
    const int n_k = static_cast<int>(ues.size());
    if (static_cast<int>(rank.size()) < n_k)
      throw std::invalid_argument("allocate_fractional: ranking of BS " + std::to_string(b) +
                                  " is shorter than its scheduled set");
    const int n_protected = std::min(part, n_k);
    const int n_shared = n_k - n_protected;
    if (n_shared > pool.shared_count)
      throw std::invalid_argument(budget_message(static_cast<int>(b), n_k, 3 * n_protected + pool.shared_count,
                                                 "usable (3 per protected UE + shared)"));

    std::vector<char> protect(ues.size(), 0);
    for (int r = 0; r < n_protected; ++r) {
      auto it = std::find(ues.begin(), ues.end(), rank[r]);
      if (it == ues.end())
        throw std::invalid_argument("allocate_fractional: ranked UE " + std::to_string(rank[r]) +
                                    " is not scheduled by BS " + std::to_string(b));
      protect[static_cast<std::size_t>(it - ues.begin())] = 1;
    }

    const int sector = static_cast<int>(b) % kSectorsPerSite;
    const auto prot = sample_without_replacement(pool.partition_begin(sector), part, n_protected, rng);
    const auto shared = sample_without_replacement(pool.protected_count, pool.shared_count, n_shared, rng);

    std::vector<int> seq(ues.size());
    std::size_t ip = 0, is = 0;
    for (std::size_t k = 0; k < ues.size(); ++k) seq[k] = protect[k] ? prot[ip++] : shared[is++];
    a.sequence.push_back(std::move(seq));
    a.is_protected.push_back(std::move(protect));
  }
  return a;
}

SrsAssignment allocate(Scheme scheme, const SrsPool& pool, const ScheduledUes& scheduled,
                       const std::vector<std::vector<int>>& rankings, Rng& rng) {
  switch (scheme) {
    case Scheme::kReuse1: return allocate_reuse1(pool, scheduled, rng);
    case Scheme::kReuse3: return allocate_reuse3(pool, scheduled, rng);
    case Scheme::kFrCc:
    case Scheme::kFrNa: return allocate_fractional(pool, scheduled, rankings, rng);
  }
  throw std::logic_error("allocate: unknown scheme");
}

}  // namespace pilotsim::srs
