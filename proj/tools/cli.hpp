#pragma once

#include <iosfwd>

namespace netcontract::cli {

/// Exit codes: 0 success, 1 input or usage error, 2 valid run whose
/// certificate failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCertificateFailed = 2;

/// Runs one command line. The run manifest goes to `out` unless --manifest
/// names a file; diagnostics go to `err` as single lines.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace netcontract::cli
