#pragma once

// Command-line front end. Each subcommand parses flags, calls the library and
// formats the result; nothing else lives here.
//
//   synth    synthetic reference/query bundles and a ground-truth table
//   project  Gaussian random projection of a bundle
//   match    ranked sequence matches for every query window
//   eval     precision/recall sweep, optionally over the full ablation grid
//   bench    D_CH and retrieval timings for original, GRP and GRP+RA

#include <iosfwd>

namespace vpralign::cli {

/// Exit status for a projection-seed mismatch between bundles.
inline constexpr int kSeedMismatchExit = 3;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vpralign::cli
