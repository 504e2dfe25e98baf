#include "drfi/error.hpp"

namespace drfi {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return 1;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kData:
      return 2;
    case ErrorKind::kInvariant:
      return 3;
  }
  return 3;
}

}  // namespace drfi
