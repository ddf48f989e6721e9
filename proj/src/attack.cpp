#include "xling/attack.hpp"

#include <algorithm>
#include <cmath>

#include "xling/errors.hpp"
#include "xling/rng.hpp"
#include "xling/utf8.hpp"

namespace xling::attack {

namespace {

struct WordSpan {
  std::size_t begin = 0;  // byte offset
  std::size_t end = 0;
};

std::vector<WordSpan> word_spans(const std::string& text) {
  std::vector<WordSpan> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    if (i >= text.size()) break;
    WordSpan span;
    span.begin = i;
    while (i < text.size() && text[i] != ' ') ++i;
    span.end = i;
    words.push_back(span);
  }
  return words;
}

struct Edit {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string replacement;
};

std::string apply_edits(const std::string& text, std::vector<Edit> edits) {
  std::sort(edits.begin(), edits.end(),
            [](const Edit& a, const Edit& b) { return a.begin < b.begin; });
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  for (const auto& edit : edits) {
    out.append(text, pos, edit.begin - pos);
    out += edit.replacement;
    pos = edit.end;
  }
  out.append(text, pos, text.size() - pos);
  return out;
}

std::size_t round_count(double rate, std::size_t eligible) {
  const auto k = static_cast<std::size_t>(std::llround(rate / 100.0 * static_cast<double>(eligible)));
  return std::min(k, eligible);
}

// Sorted selection of k unit indices out of n.
std::vector<std::size_t> select_units(std::size_t n, std::size_t k, std::uint64_t seed,
                                      std::string_view kind_name) {
  rng::SplitMix64 gen(rng::derive_all(seed, "select", kind_name));
  auto picks = rng::sample_without_replacement(n, k, gen);
  std::sort(picks.begin(), picks.end());
  return picks;
}

rng::SplitMix64 unit_stream(std::uint64_t seed, std::string_view kind_name,
                            std::size_t unit_index) {
  return rng::SplitMix64(
      rng::derive_all(seed, kind_name, "unit", static_cast<std::uint64_t>(unit_index)));
}

std::string join_chunks(const std::vector<std::string>& chunks) {
  std::string out;
  for (const auto& chunk : chunks) out += chunk;
  return out;
}

std::string remove_spaces(const std::string& text, const AttackSpec& spec) {
  std::vector<std::size_t> spaces;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == ' ') spaces.push_back(i);
  }
  const std::size_t k = round_count(spec.rate, spaces.size());
  if (k == 0) return text;
  std::vector<Edit> edits;
  for (auto pick : select_units(spaces.size(), k, spec.seed, to_string(spec.kind))) {
    edits.push_back({spaces[pick], spaces[pick] + 1, ""});
  }
  return apply_edits(text, std::move(edits));
}

// Shared driver for the four per-word kinds: filters eligible words, picks k
// of them, and lets `edit` rewrite each selected word's code-point chunks.
template <typename Eligible, typename EditFn>
std::string perturb_words(const std::string& text, const AttackSpec& spec,
                          Eligible eligible, EditFn edit) {
  const auto words = word_spans(text);
  std::vector<std::size_t> candidates;
  std::vector<std::vector<std::string>> chunked(words.size());
  for (std::size_t w = 0; w < words.size(); ++w) {
    chunked[w] = utf8::chunks(
        std::string_view(text).substr(words[w].begin, words[w].end - words[w].begin));
    if (eligible(chunked[w])) candidates.push_back(w);
  }
  const std::size_t k = round_count(spec.rate, candidates.size());
  if (k == 0) return text;

  std::vector<Edit> edits;
  const auto picks = select_units(candidates.size(), k, spec.seed, to_string(spec.kind));
  for (auto pick : picks) {
    const std::size_t w = candidates[pick];
    auto gen = unit_stream(spec.seed, to_string(spec.kind), pick);
    std::vector<std::string> chunks = chunked[w];
    edit(chunks, gen);
    edits.push_back({words[w].begin, words[w].end, join_chunks(chunks)});
  }
  return apply_edits(text, std::move(edits));
}

std::string swap_adjacent_words(const std::string& text, const AttackSpec& spec) {
  const auto words = word_spans(text);
  const std::size_t eligible = words.size() / 2;
  const std::size_t k = round_count(spec.rate, eligible);
  if (k == 0) return text;

  // Pair starts must be non-consecutive so swaps never share a word. A
  // strictly increasing draw from [0, w-k) maps bijectively onto such
  // start sets via s_i = t_i + i, keeping the choice uniform.
  rng::SplitMix64 gen(rng::derive_all(spec.seed, "select", to_string(spec.kind)));
  const auto t = rng::sorted_sample(words.size() - k, k, gen);
  std::vector<Edit> edits;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::size_t s = t[i] + i;
    const auto& a = words[s];
    const auto& b = words[s + 1];
    edits.push_back({a.begin, a.end, text.substr(b.begin, b.end - b.begin)});
    edits.push_back({b.begin, b.end, text.substr(a.begin, a.end - a.begin)});
  }
  return apply_edits(text, std::move(edits));
}

}  // namespace

std::array<AttackKind, kAttackKindCount> all_attack_kinds() {
  return {AttackKind::RemoveSpaces,        AttackKind::AddSpacesInWords,
          AttackKind::RemoveCharsFromWords, AttackKind::IntroduceSpecialChars,
          AttackKind::SwapAdjacentChars,    AttackKind::SwapAdjacentWords};
}

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::RemoveSpaces: return "remove_spaces";
    case AttackKind::AddSpacesInWords: return "add_spaces_in_words";
    case AttackKind::RemoveCharsFromWords: return "remove_chars_from_words";
    case AttackKind::IntroduceSpecialChars: return "introduce_special_chars";
    case AttackKind::SwapAdjacentChars: return "swap_adjacent_chars";
    case AttackKind::SwapAdjacentWords: return "swap_adjacent_words";
  }
  throw Error("unreachable attack kind");
}

AttackKind parse_attack_kind(const std::string& text) {
  for (const auto kind : all_attack_kinds()) {
    if (text == to_string(kind)) return kind;
  }
  throw InvalidConfig("unknown attack kind \"" + text + "\"");
}

void AttackSpec::validate() const {
  if (rate < 0.0 || rate > 100.0) {
    throw InvalidConfig("attack rate must be in [0, 100], got " + std::to_string(rate));
  }
  if (kind == AttackKind::IntroduceSpecialChars && special_charset.empty()) {
    throw InvalidConfig("introduce_special_chars needs a non-empty charset");
  }
}

std::string perturb_text(const std::string& text, const AttackSpec& spec) {
  spec.validate();
  if (spec.rate == 0.0) return text;

  switch (spec.kind) {
    case AttackKind::RemoveSpaces:
      return remove_spaces(text, spec);
    case AttackKind::AddSpacesInWords:
      return perturb_words(
          text, spec, [](const auto& chunks) { return chunks.size() >= 2; },
          [](std::vector<std::string>& chunks, rng::SplitMix64& gen) {
            const auto pos = 1 + gen.next_below(chunks.size() - 1);
            chunks.insert(chunks.begin() + static_cast<std::ptrdiff_t>(pos), " ");
          });
    case AttackKind::RemoveCharsFromWords:
      return perturb_words(
          text, spec, [](const auto& chunks) { return chunks.size() >= 3; },
          [](std::vector<std::string>& chunks, rng::SplitMix64& gen) {
            const auto pos = gen.next_below(chunks.size());
            chunks.erase(chunks.begin() + static_cast<std::ptrdiff_t>(pos));
          });
    case AttackKind::IntroduceSpecialChars:
      return perturb_words(
          text, spec, [](const auto& chunks) { return chunks.size() >= 2; },
          [&spec](std::vector<std::string>& chunks, rng::SplitMix64& gen) {
            const auto pos = 1 + gen.next_below(chunks.size() - 1);
            const char symbol =
                spec.special_charset[gen.next_below(spec.special_charset.size())];
            chunks.insert(chunks.begin() + static_cast<std::ptrdiff_t>(pos),
                          std::string(1, symbol));
          });
    case AttackKind::SwapAdjacentChars:
      return perturb_words(
          text, spec, [](const auto& chunks) { return chunks.size() >= 2; },
          [](std::vector<std::string>& chunks, rng::SplitMix64& gen) {
            const auto pos = gen.next_below(chunks.size() - 1);
            std::swap(chunks[pos], chunks[pos + 1]);
          });
    case AttackKind::SwapAdjacentWords:
      return swap_adjacent_words(text, spec);
  }
  throw Error("unreachable attack kind");
}

corpus::Corpus perturb_corpus(const corpus::Corpus& corpus, const AttackSpec& spec) {
  spec.validate();
  corpus::Corpus out = corpus;
  if (spec.rate == 0.0) return out;

  if (spec.per_post) {
    rng::SplitMix64 gen(rng::derive_all(spec.seed, "posts"));
    const std::size_t k = round_count(spec.rate, corpus.posts.size());
    auto picks = rng::sample_without_replacement(corpus.posts.size(), k, gen);
    for (auto pick : picks) {
      AttackSpec post_spec = spec;
      post_spec.rate = 100.0;
      post_spec.per_post = false;
      post_spec.seed = rng::derive_all(spec.seed, "post", corpus.posts[pick].post_id);
      out.posts[pick].text = perturb_text(corpus.posts[pick].text, post_spec);
    }
    return out;
  }

  for (auto& post : out.posts) {
    AttackSpec post_spec = spec;
    post_spec.per_post = false;
    post_spec.seed = rng::derive_all(spec.seed, "post", post.post_id);
    post.text = perturb_text(post.text, post_spec);
  }
  return out;
}

std::vector<SweepRow> attack_sweep(backend::Backend& backend,
                                   const backend::ModelHandle& handle,
                                   const corpus::Corpus& test,
                                   const std::vector<AttackKind>& kinds,
                                   const std::vector<double>& rates, std::uint64_t seed,
                                   const std::string& special_charset, bool per_post) {
  if (rates.empty() || rates.front() != 0.0) {
    throw InvalidConfig("attack sweep rates must start at 0");
  }
  if (!std::is_sorted(rates.begin(), rates.end())) {
    throw InvalidConfig("attack sweep rates must be ascending");
  }
  if (test.posts.empty()) throw EmptyEvaluation("attack sweep needs a non-empty test set");

  std::vector<BinaryLabel> gold;
  gold.reserve(test.posts.size());
  for (const auto& post : test.posts) gold.push_back(post.label);

  std::vector<SweepRow> rows;
  for (const auto kind : kinds) {
    for (const double rate : rates) {
      AttackSpec spec;
      spec.kind = kind;
      spec.rate = rate;
      spec.seed = seed;
      spec.special_charset = special_charset;
      spec.per_post = per_post;
      const auto perturbed = perturb_corpus(test, spec);

      std::vector<std::pair<std::string, std::string>> texts;
      texts.reserve(perturbed.posts.size());
      for (const auto& post : perturbed.posts) texts.emplace_back(post.post_id, post.text);
      const auto predictions = backend.predict(handle, texts);

      std::vector<BinaryLabel> pred;
      pred.reserve(predictions.size());
      for (const auto& p : predictions) pred.push_back(p.label);

      rows.push_back({kind, rate, metrics::evaluate(gold, pred)});
    }
  }
  return rows;
}

}  // namespace xling::attack
