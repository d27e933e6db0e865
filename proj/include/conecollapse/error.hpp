#pragma once

#include <stdexcept>
#include <string>

namespace conecollapse {

enum class Errc {
  DimensionMismatch,
  InvalidArgument,
  InvalidBoost,
  InvalidWorldline,
  NotOnWorldline,
  NotSpanning,
  NonSpacelike,
  MalformedSurface,
  Inconsistent,
  CorruptWeights,
  Parse,
  Validation,
};

inline const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "dimension mismatch";
    case Errc::InvalidArgument: return "invalid argument";
    case Errc::InvalidBoost: return "invalid boost";
    case Errc::InvalidWorldline: return "invalid worldline";
    case Errc::NotOnWorldline: return "event not on worldline";
    case Errc::NotSpanning: return "worldline does not span surface";
    case Errc::NonSpacelike: return "surface not spacelike";
    case Errc::MalformedSurface: return "malformed surface";
    case Errc::Inconsistent: return "inconsistent outcomes";
    case Errc::CorruptWeights: return "corrupt weight map";
    case Errc::Parse: return "parse error";
    case Errc::Validation: return "validation error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace conecollapse
