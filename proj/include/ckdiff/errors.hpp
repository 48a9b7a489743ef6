#pragma once

#include <stdexcept>
#include <string>

namespace ckdiff {

// Error categories map onto CLI exit codes: usage errors -> 1,
// data/format errors -> 2, I/O errors -> 3.
enum class ErrorKind { Usage, Data, Io };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

#define CKDIFF_DEFINE_ERROR(Name, Kind)                                                           \
    class Name : public Error {                                                                    \
      public:                                                                                      \
        explicit Name(const std::string& msg) : Error(ErrorKind::Kind, std::string(#Name ": ") + msg) {} \
    }

CKDIFF_DEFINE_ERROR(MalformedHeader, Data);
CKDIFF_DEFINE_ERROR(OffsetOutOfBounds, Data);
CKDIFF_DEFINE_ERROR(UnknownTensor, Data);
CKDIFF_DEFINE_ERROR(IoFailure, Io);
CKDIFF_DEFINE_ERROR(LengthMismatch, Data);
CKDIFF_DEFINE_ERROR(SchemaMismatch, Data);
CKDIFF_DEFINE_ERROR(EmptyMask, Data);
CKDIFF_DEFINE_ERROR(MalformedMask, Data);
CKDIFF_DEFINE_ERROR(NotAMatrix, Data);
CKDIFF_DEFINE_ERROR(EmptySequence, Data);
CKDIFF_DEFINE_ERROR(InsufficientCheckpoints, Data);
CKDIFF_DEFINE_ERROR(DimMismatch, Data);
CKDIFF_DEFINE_ERROR(DegeneratePair, Data);
CKDIFF_DEFINE_ERROR(MaskSchemaMismatch, Data);
CKDIFF_DEFINE_ERROR(InvalidArgument, Usage);

#undef CKDIFF_DEFINE_ERROR

}  // namespace ckdiff
