#pragma once

#include <stdexcept>
#include <string>

namespace fdeq {

enum class Errc {
  // model / parsing
  BlockMismatch,
  NotSelfAdjoint,
  UnknownSymbol,
  UnsupportedHaarUsage,
  SyntaxError,
  UnbalancedParens,
  MissingSection,
  BadMatrixShape,
  DuplicateName,
  // numerics
  Singular,
  NotHermitian,
  TooLarge,
  OddOrder,
  NoConvergence,
  LeftHalfPlane,
  // misc
  BadArgument,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace fdeq
