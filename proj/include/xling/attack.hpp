#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xling/backend.hpp"
#include "xling/corpus.hpp"
#include "xling/metrics.hpp"

namespace xling::attack {

enum class AttackKind {
  RemoveSpaces,
  AddSpacesInWords,
  RemoveCharsFromWords,
  IntroduceSpecialChars,
  SwapAdjacentChars,
  SwapAdjacentWords,
};

inline constexpr std::size_t kAttackKindCount = 6;

std::array<AttackKind, kAttackKindCount> all_attack_kinds();
std::string_view to_string(AttackKind kind);
AttackKind parse_attack_kind(const std::string& text);

struct AttackSpec {
  AttackKind kind = AttackKind::RemoveSpaces;
  double rate = 0.0;  // percent of eligible units
  std::uint64_t seed = 0;
  std::string special_charset = "*!@#$%&";
  // Alternate corpus-level semantics: rate selects the share of posts,
  // each selected post is perturbed fully.
  bool per_post = false;

  void validate() const;
};

// Words are maximal runs of non-space (0x20) characters; character edits
// operate on UTF-8 code points. Exactly round(rate/100 * |eligible|) units
// are modified, chosen without replacement from seeded streams.
std::string perturb_text(const std::string& text, const AttackSpec& spec);

// Per-post streams derived from (spec.seed, post_id); labels and ids kept.
corpus::Corpus perturb_corpus(const corpus::Corpus& corpus, const AttackSpec& spec);

struct SweepRow {
  AttackKind kind = AttackKind::RemoveSpaces;
  double rate = 0.0;
  metrics::MetricsReport report;
};

// One row per (kind, rate); rates must be ascending and start at 0, so the
// first row of every kind is the clean evaluation.
std::vector<SweepRow> attack_sweep(backend::Backend& backend,
                                   const backend::ModelHandle& handle,
                                   const corpus::Corpus& test,
                                   const std::vector<AttackKind>& kinds,
                                   const std::vector<double>& rates, std::uint64_t seed,
                                   const std::string& special_charset = "*!@#$%&",
                                   bool per_post = false);

}  // namespace xling::attack
