#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quokka/circuit.hpp"
#include "quokka/engine.hpp"

namespace quokka {

// Ground-truth simulator: applies every gate through its full embedded
// matrix with a generic gather/scatter, independent of the chunked engine
// path (no diagonal or control specializations). Guarded to N <= 20.
StateVector oracleSimulate(const Circuit& c, Index initial = 0);

// Undo a layout: amplitude at physical index i moves to the logical index
// with bit p of i sent to bit physToLog[p].
StateVector layoutApply(const StateVector& sv, const QubitLayout& layout);

// |<u|v>|^2; requires equal sizes.
double fidelity(const StateVector& u, const StateVector& v);

struct OrderReport {
    bool ok = true;
    std::string message;         // empty when ok
    int qubit = -1;              // first diverging logical qubit
    long expectedId = -1;
    long gotId = -1;
};

// Check that an optimized program is a faithful reordering of the raw
// circuit: same gate multiset under layout replay (fused gates expanded via
// their recorded constituents) and identical per-qubit id order.
OrderReport validateOrder(const Circuit& raw, const Program& p);

// ---- circuit generators ----
Circuit genQft(int n);                                   // n(n+1)/2 gates
Circuit genQaoa(int n, int layers, std::uint64_t seed);  // n + p*(n(n-1)/2 + n) gates
// Secret bit i set => CX from data qubit i to the ancilla (qubit n-1).
// 2n + popcount(secret) gates. Default secret: all data bits set.
Circuit genBv(int n, std::uint64_t secret);
Circuit genBvAllOnes(int n);
// One gate of `kind` per qubit (2-qubit kinds pair adjacent qubits), with
// deterministic angles.
Circuit genGateBench(GateKind kind, int n);
// Seeded random mix of all non-fused kinds.
Circuit genRandom(int n, int gates, std::uint64_t seed);

}  // namespace quokka
