#pragma once

#include <vector>

#include "quokka/circuit.hpp"

namespace quokka {

// Chunk-set selection: greedily grows a qubit set that maximizes the number
// of gates consumable by frontier closure (ties: lexicographically smaller
// qubit set, then earlier circuit position), padded to chunkSize with the
// lowest-indexed resident qubits. `pending` is scanned with per-qubit order
// respected; `residents` defaults to {0..chunkSize-1} when empty.
std::vector<int> findMaxGate(const std::vector<Gate>& pending, int nQubits, int chunkSize,
                             const std::vector<int>& residents = {});

// Emit the swaps that bring `chunkSet` (logical qubits) into positions
// [0, C). Pairs whose source position sits in the rank bits are emitted as a
// staged pre-SQS / CSQS / post-SQS sequence through the highest in-rank
// positions; the rest form one InMemory op. `layout` is updated in place.
std::vector<SwapOp> insertQubitSwaps(const std::vector<int>& chunkSet, QubitLayout& layout,
                                     const Config& cfg);

// Merge diagonal gates that can be made adjacent by commuting past other
// diagonal gates and gates on disjoint qubits. Groups are capped at C qubits;
// gates touching the rank bits are left unmerged.
Circuit fuseDiagonal(const Circuit& c, const Config& cfg);

// Merge consecutive runs of block gates whose combined dependency set stays
// within F qubits into dense fused gates. Already-fused diagonal gates act as
// barriers and single-gate runs keep their original form.
std::vector<Gate> fuseGeneral(const std::vector<Gate>& blockGates, int fusionQubits);

// Gate-block partitioning: device-level partition at N-R qubits followed by a
// cache-level pass at `chunkSize` threading one shared layout, with staged
// cross-rank transitions between device segments. isFusion selects the fusion
// flavor used on emitted blocks (0 = none).
Program findGbs(const Circuit& c, const Config& cfg, int chunkSize, bool isFusion);

// Full pipeline: diagonal fusion pre-pass, device + cache blocking, general
// fusion inside cache blocks, as enabled by cfg flags.
Program aioOptimize(const Circuit& c, const Config& cfg);

}  // namespace quokka
