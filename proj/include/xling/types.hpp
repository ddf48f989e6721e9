#pragma once

#include <array>
#include <string_view>

namespace xling {

// The ten language types of the registry. Suffixed -En codes are code-mixed
// (Roman script with English interleaving), not separate languages.
enum class LanguageCode { Bn, En, Hi, HiEn, KaEn, MaEn, Mr, TaEn, UrEn, Ur };

enum class LanguageFamily { IndoAryan, Dravidian, Germanic };

inline constexpr int kLanguageCount = 10;

const std::array<LanguageCode, kLanguageCount>& all_language_types();

LanguageFamily family_of(LanguageCode code);

// True for the five non-code-mixed types.
bool is_monolingual(LanguageCode code);

std::string_view to_string(LanguageCode code);
std::string_view to_string(LanguageFamily family);
LanguageCode parse_language(std::string_view text);

enum class BinaryLabel { Abusive, Normal };

std::string_view to_string(BinaryLabel label);
BinaryLabel parse_label(std::string_view text);

}  // namespace xling
