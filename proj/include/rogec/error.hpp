#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rogec {

/// Base class of every data error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An error tied to a 1-based line of some input file.
class LineError : public Error {
 public:
  LineError(const std::string& what, std::size_t line_no)
      : Error(what + " at line " + std::to_string(line_no)), line_no_(line_no) {}
  std::size_t line_no() const noexcept { return line_no_; }

 private:
  std::size_t line_no_;
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input") {}
};

class InvalidUtf8 : public Error {
 public:
  InvalidUtf8() : Error("invalid UTF-8") {}
};

class MalformedLine : public LineError {
 public:
  explicit MalformedLine(std::size_t line_no, const std::string& why = "malformed CoNLL-U line")
      : LineError(why, line_no) {}
};

class UnknownTag : public LineError {
 public:
  explicit UnknownTag(std::size_t line_no) : LineError("unknown UPOS tag", line_no) {}
};

class OverlappingEdits : public Error {
 public:
  OverlappingEdits() : Error("edits overlap or are not sorted") {}
};

class SpanOutOfBounds : public Error {
 public:
  SpanOutOfBounds() : Error("edit span out of bounds") {}
};

class MissingAnnotations : public Error {
 public:
  explicit MissingAnnotations(std::optional<std::size_t> sentence = std::nullopt)
      : Error(sentence ? "missing lemma/upos annotations in sentence " + std::to_string(*sentence)
                       : std::string("missing lemma/upos annotations")),
        sentence_(sentence) {}
  std::optional<std::size_t> sentence() const noexcept { return sentence_; }

 private:
  std::optional<std::size_t> sentence_;
};

class LengthMismatch : public Error {
 public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class MalformedM2 : public LineError {
 public:
  explicit MalformedM2(std::size_t line_no) : LineError("malformed M2", line_no) {}
};

class MalformedArpa : public LineError {
 public:
  MalformedArpa(std::size_t line_no, const std::string& why = "malformed ARPA")
      : LineError(why, line_no) {}
};

class EmptySentence : public Error {
 public:
  EmptySentence() : Error("cannot corrupt an empty sentence") {}
};

class EmptyHypothesisList : public Error {
 public:
  EmptyHypothesisList() : Error("empty hypothesis list") {}
};

class EmptyLexicon : public Error {
 public:
  EmptyLexicon() : Error("lexicon is empty") {}
};

}  // namespace rogec
