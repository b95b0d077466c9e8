#pragma once

#include <stdexcept>
#include <string>

namespace hamflow {

enum class Errc {
  MalformedFile,
  NonFiniteValue,
  BadDimensions,
  UnknownCase,
  ShapeMismatch,
  ZeroOnLoop,
  NonConvergent,
  Ambiguous,
  Inconsistent,
  UnresolvedEnd,
  SeedSingular,
  UnresolvedSeparatrix,
  UnclassifiableRegion,
  SideAmbiguous,
  MultiVertexSide,
  NotHamiltonian,
  TooLarge,
  UnrealizableSpec,
  RoundTripMismatch,
  IncompleteAnalysis,
  IoError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace hamflow
