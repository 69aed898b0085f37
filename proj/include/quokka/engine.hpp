#pragma once

#include <utility>
#include <vector>

#include "quokka/circuit.hpp"

namespace quokka {

struct StateVector {
    int nQubits = 0;
    std::vector<Amp> amps;

    double norm() const;  // sum of |amp|^2
};

// |initial> basis state.
StateVector initState(int nQubits, Index initial = 0);

// Exchange the index bits of each listed pair; an involution.
Index bitswap(Index x, const std::vector<std::pair<int, int>>& pairs);

// Cache-line-aware traversal order for imsSwap: with c = |{out positions
// < CL}|, routes the bits at [CL, CL+c) to the lowest swap-in positions >= CL
// so that the pair (m, n) touched by consecutive t values shares cache lines.
// A bit permutation of t; composing with bitswap still visits every pair once.
Index bitshift(Index t, const std::vector<std::pair<int, int>>& pairs, int cacheLineQubits);

// In-memory qubit swap: applies the bitswap permutation of op.pairs to the
// amplitudes using the bitshift traversal. Deterministic for any thread count.
void imsSwap(StateVector& sv, const SwapOp& op, int cacheLineQubits, int threads = 1);

// Apply one gate across the whole vector (the gate-by-gate engine path).
void applyGate(StateVector& sv, const Gate& g);

// Apply a gate block chunk by chunk; every gate position must be < chunkQubits.
// Chunks are partitioned across threads; results are thread-count invariant.
void applyBlock(StateVector& sv, const GateBlock& block, int chunkQubits, int threads = 1);

struct SimResult {
    StateVector state;       // physical qubit order
    QubitLayout layout;      // final logical->physical map
};

// Single-rank program execution (rejects CrossRank ops; those need the
// multi-rank frontend in distributed.hpp). threads = 0 picks QUOKKA_THREADS
// or hardware concurrency.
SimResult simulateProgram(const Program& p, const Config& cfg, Index initial = 0,
                          int threads = 0);

// Raw circuit, gate by gate, no blocking or layout changes.
StateVector simulateGateByGate(const Circuit& c, Index initial = 0, int threads = 0);

int resolveThreads(int requested);

}  // namespace quokka
