#pragma once

#include <stdexcept>
#include <string>

namespace xling {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// corpus
struct UnknownRawLabel : Error { using Error::Error; };
struct CountMismatch : Error { using Error::Error; };
struct DuplicatePostId : Error { using Error::Error; };
struct ClassTooSmall : Error { using Error::Error; };
struct InsufficientGold : Error { using Error::Error; };

// backend
struct SingleClassCorpus : Error { using Error::Error; };
struct BackendUnavailable : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// metrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptyEvaluation : Error { using Error::Error; };
struct EmptyList : Error { using Error::Error; };

// transfer
struct RegimeConstraintViolation : Error { using Error::Error; };
struct MissingSplit : Error { using Error::Error; };
struct HygieneViolation : Error { using Error::Error; };

// translation
struct CacheMiss : Error { using Error::Error; };
struct ProviderFailure : Error { using Error::Error; };

// cli / configuration
struct ManifestError : Error { using Error::Error; };

}  // namespace xling
