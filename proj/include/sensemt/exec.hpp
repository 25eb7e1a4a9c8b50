#pragma once

namespace sensemt {

/// Selects between the OpenMP kernel and its serial reference.
/// Both must produce identical results; the serial path exists for testing
/// and benchmarking.
enum class Exec { serial, parallel };

}  // namespace sensemt
