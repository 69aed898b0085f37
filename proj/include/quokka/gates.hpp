#pragma once

#include <string>
#include <vector>

#include "quokka/common.hpp"

namespace quokka {

enum class GateKind {
    H,
    U,   // generic 1-qubit gate, params (theta, phi, lambda)
    X,
    CX,
    CP,
    SWAP,
    RX,
    RY,
    RZ,
    RZZ,
    FusedDiag,   // file token D<k>, payload = 2^k diagonal entries
    FusedDense,  // file token U<k>, payload = 2^k x 2^k row-major matrix
};

struct Gate {
    GateKind kind = GateKind::H;
    std::vector<int> targets;
    std::vector<int> controls;   // CX/CP store their control here
    std::vector<double> params;
    long id = -1;

    // Fused gates only.
    std::vector<Amp> payload;
    std::vector<Gate> constituents;  // original gates, same qubit frame as targets

    // Combined qubit list in matrix order: controls first, then targets.
    // The first listed qubit is the most significant bit of the gate's
    // 2^arity sub-index, so gateMatrix(CX) maps |10> <-> |11>.
    std::vector<int> qubits() const;
    int arity() const { return int(targets.size() + controls.size()); }
    std::uint64_t depMask() const;
    int fusedArity() const { return int(targets.size()); }
};

const char* kindName(GateKind kind);
bool isDiagonal(GateKind kind);
inline bool isDiagonal(const Gate& g) { return isDiagonal(g.kind); }

// Fixed arity / parameter count for non-fused kinds.
int kindArity(GateKind kind);
int kindParamCount(GateKind kind);

// Full 2^a x 2^a unitary (row-major), control semantics folded in.
std::vector<Amp> gateMatrix(const Gate& g);

// Diagonal entries for diagonal kinds; throws SimulationError otherwise.
std::vector<Amp> gateDiagonal(const Gate& g);

Gate makeGate(GateKind kind, std::vector<int> targets, std::vector<int> controls,
              std::vector<double> params, long id);

inline Gate makeH(int t, long id) { return makeGate(GateKind::H, {t}, {}, {}, id); }
inline Gate makeX(int t, long id) { return makeGate(GateKind::X, {t}, {}, {}, id); }
inline Gate makeU(int t, double th, double ph, double la, long id) {
    return makeGate(GateKind::U, {t}, {}, {th, ph, la}, id);
}
inline Gate makeRX(int t, double th, long id) { return makeGate(GateKind::RX, {t}, {}, {th}, id); }
inline Gate makeRY(int t, double th, long id) { return makeGate(GateKind::RY, {t}, {}, {th}, id); }
inline Gate makeRZ(int t, double th, long id) { return makeGate(GateKind::RZ, {t}, {}, {th}, id); }
inline Gate makeCX(int c, int t, long id) { return makeGate(GateKind::CX, {t}, {c}, {}, id); }
inline Gate makeCP(int c, int t, double th, long id) {
    return makeGate(GateKind::CP, {t}, {c}, {th}, id);
}
inline Gate makeSWAP(int a, int b, long id) { return makeGate(GateKind::SWAP, {a, b}, {}, {}, id); }
inline Gate makeRZZ(int a, int b, double th, long id) {
    return makeGate(GateKind::RZZ, {a, b}, {}, {th}, id);
}

}  // namespace quokka
