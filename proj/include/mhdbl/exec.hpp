#pragma once

namespace mhdbl {

/// Selects the kernel family. Serial is the reference implementation kept
/// for testing; Parallel splits independent rows or columns over OpenMP
/// threads. Both produce bitwise-identical results for every kernel except
/// the x-derivative, whose serial reference is a direct DFT.
enum class Exec { Serial, Parallel };

}  // namespace mhdbl
