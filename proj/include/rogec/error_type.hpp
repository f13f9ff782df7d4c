#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

#include "rogec/text_model.hpp"

namespace rogec {

enum class ErrorCategory { Pos, PosForm, Morph, Orth, Spell, Order, Other };

/// The 14 UD tags that form the POS error category. PROPN is folded into
/// NOUN; SYM and X have no POS category and end up as OTHER.
inline constexpr std::array<UPos, 14> kPosCategoryTags = {
    UPos::NOUN, UPos::VERB,  UPos::ADJ,   UPos::ADV, UPos::PRON, UPos::DET,  UPos::ADP,
    UPos::CCONJ, UPos::SCONJ, UPos::PUNCT, UPos::NUM, UPos::PART, UPos::INTJ, UPos::AUX};

constexpr std::optional<UPos> pos_category_tag(UPos tag) {
  switch (tag) {
    case UPos::PROPN: return UPos::NOUN;
    case UPos::SYM:
    case UPos::X: return std::nullopt;
    default: return tag;
  }
}

/// One Romanian-ERRANT error type, e.g. ORDER, POS:NOUN or POS:VERB:FORM.
struct ErrorType {
  ErrorCategory category = ErrorCategory::Other;
  std::optional<UPos> pos;  // set iff category is Pos or PosForm

  static constexpr ErrorType order() { return {ErrorCategory::Order, std::nullopt}; }
  static constexpr ErrorType orth() { return {ErrorCategory::Orth, std::nullopt}; }
  static constexpr ErrorType spell() { return {ErrorCategory::Spell, std::nullopt}; }
  static constexpr ErrorType morph() { return {ErrorCategory::Morph, std::nullopt}; }
  static constexpr ErrorType other() { return {ErrorCategory::Other, std::nullopt}; }
  static constexpr ErrorType pos_of(UPos t) { return {ErrorCategory::Pos, t}; }
  static constexpr ErrorType pos_form(UPos t) { return {ErrorCategory::PosForm, t}; }

  friend constexpr bool operator==(const ErrorType&, const ErrorType&) = default;
  friend constexpr auto operator<=>(const ErrorType&, const ErrorType&) = default;
};

inline std::string to_string(const ErrorType& t) {
  switch (t.category) {
    case ErrorCategory::Pos: return "POS:" + std::string(to_string(*t.pos));
    case ErrorCategory::PosForm: return "POS:" + std::string(to_string(*t.pos)) + ":FORM";
    case ErrorCategory::Morph: return "MORPH";
    case ErrorCategory::Orth: return "ORTH";
    case ErrorCategory::Spell: return "SPELL";
    case ErrorCategory::Order: return "ORDER";
    case ErrorCategory::Other: return "OTHER";
  }
  return "OTHER";
}

inline std::optional<ErrorType> parse_error_type(std::string_view s) {
  if (s == "MORPH") return ErrorType::morph();
  if (s == "ORTH") return ErrorType::orth();
  if (s == "SPELL") return ErrorType::spell();
  if (s == "ORDER") return ErrorType::order();
  if (s == "OTHER") return ErrorType::other();
  if (!s.starts_with("POS:")) return std::nullopt;
  s.remove_prefix(4);
  bool form = false;
  if (s.ends_with(":FORM")) {
    form = true;
    s.remove_suffix(5);
  }
  auto tag = parse_upos(s);
  if (!tag || pos_category_tag(*tag) != tag) return std::nullopt;
  return form ? ErrorType::pos_form(*tag) : ErrorType::pos_of(*tag);
}

/// Coarse group used in corpus statistics: POS (both plain and :FORM),
/// MORPH, ORTH, SPELL, ORDER, OTHER.
inline std::string_view group_name(const ErrorType& t) {
  switch (t.category) {
    case ErrorCategory::Pos:
    case ErrorCategory::PosForm: return "POS";
    case ErrorCategory::Morph: return "MORPH";
    case ErrorCategory::Orth: return "ORTH";
    case ErrorCategory::Spell: return "SPELL";
    case ErrorCategory::Order: return "ORDER";
    case ErrorCategory::Other: return "OTHER";
  }
  return "OTHER";
}

/// Label used in M2 files for an edit without a type.
inline constexpr std::string_view kUnknownTypeLabel = "UNK";

inline std::string type_label(const std::optional<ErrorType>& t) {
  return t ? to_string(*t) : std::string(kUnknownTypeLabel);
}

}  // namespace rogec
