#include "xling/types.hpp"

#include <string>

#include "xling/errors.hpp"

namespace xling {

const std::array<LanguageCode, kLanguageCount>& all_language_types() {
  static const std::array<LanguageCode, kLanguageCount> kAll = {
      LanguageCode::Bn,   LanguageCode::En,   LanguageCode::Hi,
      LanguageCode::HiEn, LanguageCode::KaEn, LanguageCode::MaEn,
      LanguageCode::Mr,   LanguageCode::TaEn, LanguageCode::UrEn,
      LanguageCode::Ur};
  return kAll;
}

LanguageFamily family_of(LanguageCode code) {
  switch (code) {
    case LanguageCode::Bn:
    case LanguageCode::Hi:
    case LanguageCode::HiEn:
    case LanguageCode::Mr:
    case LanguageCode::UrEn:
    case LanguageCode::Ur:
      return LanguageFamily::IndoAryan;
    case LanguageCode::KaEn:
    case LanguageCode::MaEn:
    case LanguageCode::TaEn:
      return LanguageFamily::Dravidian;
    case LanguageCode::En:
      return LanguageFamily::Germanic;
  }
  throw Error("unknown language code");
}

bool is_monolingual(LanguageCode code) {
  switch (code) {
    case LanguageCode::Bn:
    case LanguageCode::En:
    case LanguageCode::Hi:
    case LanguageCode::Mr:
    case LanguageCode::Ur:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(LanguageCode code) {
  switch (code) {
    case LanguageCode::Bn: return "Bn";
    case LanguageCode::En: return "En";
    case LanguageCode::Hi: return "Hi";
    case LanguageCode::HiEn: return "Hi-En";
    case LanguageCode::KaEn: return "Ka-En";
    case LanguageCode::MaEn: return "Ma-En";
    case LanguageCode::Mr: return "Mr";
    case LanguageCode::TaEn: return "Ta-En";
    case LanguageCode::UrEn: return "Ur-En";
    case LanguageCode::Ur: return "Ur";
  }
  throw Error("unknown language code");
}

std::string_view to_string(LanguageFamily family) {
  switch (family) {
    case LanguageFamily::IndoAryan: return "Indo-Aryan";
    case LanguageFamily::Dravidian: return "Dravidian";
    case LanguageFamily::Germanic: return "Germanic";
  }
  throw Error("unknown language family");
}

LanguageCode parse_language(std::string_view text) {
  for (LanguageCode code : all_language_types()) {
    if (to_string(code) == text) return code;
  }
  throw Error("unknown language type: " + std::string(text));
}

std::string_view to_string(BinaryLabel label) {
  return label == BinaryLabel::Abusive ? "abusive" : "normal";
}

BinaryLabel parse_label(std::string_view text) {
  if (text == "abusive") return BinaryLabel::Abusive;
  if (text == "normal") return BinaryLabel::Normal;
  throw Error("unknown binary label: " + std::string(text));
}

}  // namespace xling
