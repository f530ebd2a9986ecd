#pragma once

#include <chrono>
#include <string>

#include "trackaudit/domain.hpp"
#include "trackaudit/result.hpp"
#include "trackaudit/web.hpp"

namespace trackaudit::fetch {

enum class FetchErrorKind {
  BadUrl,
  UnsupportedScheme,
  DnsFailure,
  ConnectionFailure,
  Timeout,
  HttpError,
  TooManyRedirects,
};

std::string_view to_string(FetchErrorKind kind);

struct FetchError {
  FetchErrorKind kind;
  int status = 0;  // for HttpError
  std::string message;
};

struct FetchOptions {
  int redirect_limit = 5;
  std::chrono::seconds timeout{30};
};

/// One shot pre-consent capture of a page: follows redirects, records every
/// Set-Cookie along the chain (value hashed immediately), and one request
/// record per loaded resource found statically in the final document.
/// No script execution, so cookies set by JS are absent; a browser capture
/// file is the richer path. Failures are per-site values, never exceptions,
/// so batches can keep going.
Result<web::CaptureSession, FetchError> static_fetch(const std::string& url,
                                                     const PublicSuffixList& psl,
                                                     const FetchOptions& options = {});

}  // namespace trackaudit::fetch
