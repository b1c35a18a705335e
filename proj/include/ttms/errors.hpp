#pragma once

#include <stdexcept>
#include <string>

namespace ttms {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class FieldOverflowError : public Error {
  public:
    FieldOverflowError(std::string field, unsigned long value, unsigned width)
        : Error("context field '" + field + "' value " + std::to_string(value) + " exceeds " +
                std::to_string(width) + " bits"),
          field_(std::move(field)) {}

    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

#define TTMS_DEFINE_ERROR(Name)                                                                    \
    class Name : public Error {                                                                    \
      public:                                                                                      \
        using Error::Error;                                                                        \
    }

TTMS_DEFINE_ERROR(ModelError);
TTMS_DEFINE_ERROR(UnknownTaskError);
TTMS_DEFINE_ERROR(UnknownHardwareError);
TTMS_DEFINE_ERROR(PlatformExhaustedError);
TTMS_DEFINE_ERROR(CycleDetectedError);
TTMS_DEFINE_ERROR(InvalidInferenceError);
TTMS_DEFINE_ERROR(InfeasibleScheduleError);
TTMS_DEFINE_ERROR(NoRouteError);
TTMS_DEFINE_ERROR(UnsafeScheduleError);
TTMS_DEFINE_ERROR(OutOfRangeError);
TTMS_DEFINE_ERROR(UnknownNodeError);
TTMS_DEFINE_ERROR(KeyConflictError);
TTMS_DEFINE_ERROR(GraphCycleError);
TTMS_DEFINE_ERROR(UnknownActionError);
TTMS_DEFINE_ERROR(EmptyActionSpaceError);
TTMS_DEFINE_ERROR(DimensionMismatchError);
TTMS_DEFINE_ERROR(ArchitectureMismatchError);
TTMS_DEFINE_ERROR(NonFiniteLossError);
TTMS_DEFINE_ERROR(EmptyValidationSetError);
TTMS_DEFINE_ERROR(ConfigError);
TTMS_DEFINE_ERROR(HorizonTooShortError);
TTMS_DEFINE_ERROR(FormatError);

#undef TTMS_DEFINE_ERROR

} // namespace ttms
