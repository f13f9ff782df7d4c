#pragma once

// M2 reader and writer.
//
//   S <tokens>
//   A <start> <end>|||<type>|||<correction>|||REQUIRED|||-NONE-|||0
//   <blank>
//
// A sentence without edits carries a single noop annotation.

#include <algorithm>
#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rogec/align.hpp"
#include "rogec/error.hpp"
#include "rogec/error_type.hpp"
#include "rogec/text_model.hpp"

namespace rogec {

struct M2Entry {
  Sentence source;
  std::vector<Edit> edits;

  friend bool operator==(const M2Entry&, const M2Entry&) = default;
};

inline constexpr std::string_view kNoopLine = "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0";

inline void write_m2(std::ostream& out, const Sentence& orig, const std::vector<Edit>& edits) {
  out << "S " << render(orig) << '\n';
  if (edits.empty()) out << kNoopLine << '\n';
  for (const auto& e : edits)
    out << "A " << e.o_span.begin << ' ' << e.o_span.end << "|||" << type_label(e.etype) << "|||" << e.c_text
        << "|||REQUIRED|||-NONE-|||0\n";
  out << '\n';
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + sep.size();
  }
}

inline bool parse_long(std::string_view s, long& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc{} && p == s.data() + s.size();
}

// Fills in o_text and reconstructs c_span from the running length offset.
inline void finish_entry(M2Entry& entry, std::size_t line_no) {
  auto& edits = entry.edits;
  std::stable_sort(edits.begin(), edits.end(),
                   [](const Edit& a, const Edit& b) { return a.o_span.begin < b.o_span.begin; });
  long offset = 0;
  for (auto& e : edits) {
    if (e.o_span.end > entry.source.size()) throw MalformedM2(line_no);
    e.o_text = join_forms(entry.source, e.o_span);
    auto c_len = static_cast<long>(split_whitespace(e.c_text).size());
    auto c_begin = static_cast<long>(e.o_span.begin) + offset;
    if (c_begin < 0) throw MalformedM2(line_no);
    e.c_span = {static_cast<std::size_t>(c_begin), static_cast<std::size_t>(c_begin + c_len)};
    offset += c_len - static_cast<long>(e.o_span.size());
  }
}

}  // namespace detail

/// Reads every sentence block. Unknown type labels (and "UNK") become
/// untyped edits; a "-NONE-" correction is read as a deletion.
inline std::vector<M2Entry> read_m2(std::istream& in) {
  std::vector<M2Entry> out;
  std::optional<M2Entry> cur;
  std::size_t cur_start = 0;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (cur) {
      detail::finish_entry(*cur, cur_start);
      out.push_back(std::move(*cur));
      cur.reset();
    }
  };
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line == "S" || line.starts_with("S ")) {
      flush();
      cur.emplace();
      cur_start = line_no;
      std::string_view text = std::string_view(line).substr(line.size() > 1 ? 2 : 1);
      if (!unicode::is_valid(text)) throw MalformedM2(line_no);
      cur->source = make_sentence(split_whitespace(text));
      continue;
    }
    if (!line.starts_with("A ") || !cur) throw MalformedM2(line_no);
    auto fields = detail::split_fields(std::string_view(line).substr(2), "|||");
    if (fields.size() != 6) throw MalformedM2(line_no);
    auto span_parts = split_whitespace(fields[0]);
    long b = 0, e = 0, annotator = 0;
    if (span_parts.size() != 2 || !detail::parse_long(span_parts[0], b) || !detail::parse_long(span_parts[1], e) ||
        !detail::parse_long(fields[5], annotator))
      throw MalformedM2(line_no);
    if (b == -1 && e == -1) continue;  // noop
    if (b < 0 || e < b || static_cast<std::size_t>(e) > cur->source.size()) throw MalformedM2(line_no);
    Edit edit;
    edit.o_span = {static_cast<std::size_t>(b), static_cast<std::size_t>(e)};
    std::string_view corr = fields[2];
    if (corr == "-NONE-") corr = {};
    if (!unicode::is_valid(corr)) throw MalformedM2(line_no);
    edit.c_text = std::string(corr);
    edit.etype = parse_error_type(fields[1]);
    if (edit.o_span.empty() && edit.c_text.empty()) throw MalformedM2(line_no);
    cur->edits.push_back(std::move(edit));
  }
  flush();
  return out;
}

}  // namespace rogec
