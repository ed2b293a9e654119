#pragma once

#include <stdexcept>
#include <string>

namespace ripstream {

// Error hierarchy. The CLI maps each family onto its own exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad point file, invalid flags, out-of-range vertices.
class InputError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure: open, read, write, rename.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file exists and is readable but its contents are not what they claim.
class FormatError : public Error {
 public:
  using Error::Error;
};

// An edge file whose tail holds a partial record.
class StreamCorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

class FingerprintMismatchError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Internal invariant broken: duplicate edges, simplices out of order, missing
// facets. Always a bug in the caller or in the engine itself.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace ripstream
