#pragma once

#include <stdexcept>
#include <string>

namespace lightrays {

// Every failure raised by the library derives from Error so callers (the
// scenario runner in particular) can attach context and rethrow.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define LIGHTRAYS_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  };

LIGHTRAYS_DEFINE_ERROR(OutOfDomain)
LIGHTRAYS_DEFINE_ERROR(ModelError)
LIGHTRAYS_DEFINE_ERROR(NotNull)
LIGHTRAYS_DEFINE_ERROR(NotFuture)
LIGHTRAYS_DEFINE_ERROR(NotPregeodesic)
LIGHTRAYS_DEFINE_ERROR(GridMismatch)
LIGHTRAYS_DEFINE_ERROR(NotNormalized)
LIGHTRAYS_DEFINE_ERROR(NotLightRayField)
LIGHTRAYS_DEFINE_ERROR(BaseMismatch)
LIGHTRAYS_DEFINE_ERROR(NotSpacelike)
LIGHTRAYS_DEFINE_ERROR(SliceOutsideBox)
LIGHTRAYS_DEFINE_ERROR(NoCrossing)
LIGHTRAYS_DEFINE_ERROR(MultipleCrossings)
LIGHTRAYS_DEFINE_ERROR(WrongMetric)
LIGHTRAYS_DEFINE_ERROR(ParseError)
LIGHTRAYS_DEFINE_ERROR(CoverageError)

#undef LIGHTRAYS_DEFINE_ERROR

}  // namespace lightrays
