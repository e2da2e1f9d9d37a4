#pragma once

namespace atm {

/// Kernels come in two flavours: an OpenMP-parallel one and the serial
/// reference it is tested against.
enum class ExecPolicy { Serial, Parallel };

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

}  // namespace atm
