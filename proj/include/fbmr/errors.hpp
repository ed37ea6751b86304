#pragma once

#include <stdexcept>
#include <string>

namespace fbmr {

// Base of every error raised by the library. The CLI maps these to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FBMR_DEFINE_ERROR(Name)                 \
  class Name : public Error {                   \
   public:                                      \
    explicit Name(const std::string& what)      \
        : Error(std::string(#Name ": ") + what) \
    {}                                          \
  }

FBMR_DEFINE_ERROR(SymmetryViolation);
FBMR_DEFINE_ERROR(MassError);
FBMR_DEFINE_ERROR(DomainError);
FBMR_DEFINE_ERROR(EmbeddingError);
FBMR_DEFINE_ERROR(SizeError);
FBMR_DEFINE_ERROR(IndexError);
FBMR_DEFINE_ERROR(DerivativeOrderError);
FBMR_DEFINE_ERROR(InfiniteEll);
FBMR_DEFINE_ERROR(SampleSizeError);
FBMR_DEFINE_ERROR(GridError);
FBMR_DEFINE_ERROR(ConfigError);
FBMR_DEFINE_ERROR(IoError);
FBMR_DEFINE_ERROR(ControlFailure);

#undef FBMR_DEFINE_ERROR

}  // namespace fbmr
