#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "quokka/gates.hpp"

namespace quokka {

struct Circuit {
    int nQubits = 0;
    std::vector<Gate> gates;
};

// Logical <-> physical qubit position maps. Qubit 0 is the least significant
// bit of the state-vector index; the optimizer permutes positions with swap
// operations and records the running map here.
struct QubitLayout {
    std::vector<int> logToPhys;
    std::vector<int> physToLog;

    static QubitLayout identity(int n);
    int size() const { return int(logToPhys.size()); }
    bool isIdentity() const;
    // Swap the contents of two physical positions.
    void swapPositions(int a, int b);
    void applyPairs(const std::vector<std::pair<int, int>>& pairs);
};

struct SwapOp {
    enum Kind { InMemory, CrossRank };
    Kind kind = InMemory;
    // (out, in) position pairs; both sides ascending, out_i < in_i.
    std::vector<std::pair<int, int>> pairs;
};

struct GateBlock {
    std::vector<Gate> gates;   // qubit fields are physical positions < chunk size
    std::vector<int> chunkSet; // logical qubits resident while the block runs (not serialized)
};

struct ProgramItem {
    enum Type { Block, Swap };
    Type type = Block;
    GateBlock block;
    SwapOp swap;

    static ProgramItem makeBlock(GateBlock b);
    static ProgramItem makeSwap(SwapOp s);
};

struct Program {
    int nQubits = 0;
    int rankQubits = 0;
    int chunkQubits = 0;
    std::vector<ProgramItem> items;
    QubitLayout finalLayout;  // replaying all SwapOps from identity yields this

    size_t blockCount() const;
    size_t swapCount(SwapOp::Kind kind) const;
    size_t gateCount() const;
};

struct Config {
    int totalQubits = 0;      // N
    int rankQubits = 0;       // R; 2^R ranks
    int bufferQubits = -1;    // B; cross-rank exchange buffer holds 2^B amplitudes
    int chunkQubits = -1;     // C
    int fusionQubits = -1;    // F
    int cacheLineQubits = -1; // CL
    bool imsEnabled = true;
    bool xrsEnabled = true;
    bool fusionEnabled = true;
    bool diagonalFusionEnabled = true;

    int rankRegion() const { return totalQubits - rankQubits; }  // N - R
    // Fill unset fields with defaults (C=10, F=5, CL=2, B=min(N-R,28),
    // clamped to the rank region) and check invariants; throws ConfigError.
    void finalize();
};

// ---- raw circuit text ----
// One gate per line: [kind] [qubits...] [id] [params...]. CX/CP list the
// control first. '#' and '//' start comments. Missing trailing angles default
// to 0 with a warning on the stream passed in (stderr by default).
Circuit parseCircuit(std::istream& in, int nQubits = -1);
Circuit parseCircuitFile(const std::string& path, int nQubits = -1);
std::string serializeCircuit(const Circuit& c);

// ---- optimized program text ----
// Records: an integer k line followed by k gate lines forms a GateBlock;
// swap lines "SQS S a_1..a_S b_1..b_S" / "CSQS ..." form SwapOps (the
// serializer wraps each in its own size-1 record, the parser accepts both
// wrapped and bare forms). Fused gate lines carry their payload inline and a
// trailing "G <count> ..." constituent section for provenance.
Program parseProgram(std::istream& in, const Config& cfg, bool lenient = false);
Program parseProgramFile(const std::string& path, const Config& cfg, bool lenient = false);
std::string serializeProgram(const Program& p);

// ---- config text ----
// INI with a [system] section: total_qbit, rank_qbit, buffer_qbit, chunk_qbit,
// fusion_qbit, cache_line_qbit, ims, xrs, fusion, diagonal_fusion.
Config parseConfig(std::istream& in);
Config parseConfigFile(const std::string& path);
std::string serializeConfig(const Config& cfg);

// Shared by both parsers; physical or logical qubit meaning is the caller's.
Gate parseGateLine(const std::string& line, int lineNo);
std::string serializeGate(const Gate& g);

}  // namespace quokka
