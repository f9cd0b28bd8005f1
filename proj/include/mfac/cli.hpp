#pragma once

/// Command-line front end: `train`, `analytic`, `export-hist`.
///
/// Exit codes: 0 completed, 1 unexpected error, 2 config error, 3 fault state.

namespace mfac {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFault = 3;

int run_cli(int argc, char** argv);

}  // namespace mfac
