#include "quokka/gates.hpp"

#include <cassert>
#include <cmath>

namespace quokka {

std::vector<int> Gate::qubits() const {
    std::vector<int> q = controls;
    q.insert(q.end(), targets.begin(), targets.end());
    return q;
}

std::uint64_t Gate::depMask() const {
    std::uint64_t m = 0;
    for (int q : targets) m |= 1ULL << q;
    for (int q : controls) m |= 1ULL << q;
    return m;
}

const char* kindName(GateKind kind) {
    switch (kind) {
        case GateKind::H: return "H";
        case GateKind::U: return "U";
        case GateKind::X: return "X";
        case GateKind::CX: return "CX";
        case GateKind::CP: return "CP";
        case GateKind::SWAP: return "SWAP";
        case GateKind::RX: return "RX";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::RZZ: return "RZZ";
        case GateKind::FusedDiag: return "D";
        case GateKind::FusedDense: return "U";
    }
    return "?";
}

bool isDiagonal(GateKind kind) {
    switch (kind) {
        case GateKind::RZ:
        case GateKind::RZZ:
        case GateKind::CP:
        case GateKind::FusedDiag:
            return true;
        default:
            return false;
    }
}

int kindArity(GateKind kind) {
    switch (kind) {
        case GateKind::H:
        case GateKind::U:
        case GateKind::X:
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
            return 1;
        case GateKind::CX:
        case GateKind::CP:
        case GateKind::SWAP:
        case GateKind::RZZ:
            return 2;
        default:
            return -1;  // fused kinds carry their arity in the token
    }
}

int kindParamCount(GateKind kind) {
    switch (kind) {
        case GateKind::U: return 3;
        case GateKind::CP:
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
        case GateKind::RZZ:
            return 1;
        default:
            return 0;
    }
}

namespace {

std::vector<Amp> mat2(Amp a, Amp b, Amp c, Amp d) { return {a, b, c, d}; }

}  // namespace

std::vector<Amp> gateDiagonal(const Gate& g) {
    const Amp one(1.0, 0.0);
    switch (g.kind) {
        case GateKind::RZ: {
            double t = g.params.at(0) / 2.0;
            return {Amp(std::cos(t), -std::sin(t)), Amp(std::cos(t), std::sin(t))};
        }
        case GateKind::RZZ: {
            double t = g.params.at(0) / 2.0;
            Amp m(std::cos(t), -std::sin(t));
            Amp p(std::cos(t), std::sin(t));
            return {m, p, p, m};
        }
        case GateKind::CP: {
            double t = g.params.at(0);
            return {one, one, one, Amp(std::cos(t), std::sin(t))};
        }
        case GateKind::FusedDiag:
            return g.payload;
        default:
            throw SimulationError(std::string("gateDiagonal: ") + kindName(g.kind) +
                                  " is not diagonal");
    }
}

std::vector<Amp> gateMatrix(const Gate& g) {
    const double s2 = 1.0 / std::sqrt(2.0);
    switch (g.kind) {
        case GateKind::H:
            return mat2(s2, s2, s2, -s2);
        case GateKind::X:
            return mat2(0, 1, 1, 0);
        case GateKind::U: {
            double th = g.params.at(0), ph = g.params.at(1), la = g.params.at(2);
            double c = std::cos(th / 2.0), s = std::sin(th / 2.0);
            return mat2(Amp(c, 0.0),
                        -Amp(std::cos(la), std::sin(la)) * s,
                        Amp(std::cos(ph), std::sin(ph)) * s,
                        Amp(std::cos(ph + la), std::sin(ph + la)) * c);
        }
        case GateKind::RX: {
            double t = g.params.at(0) / 2.0;
            double c = std::cos(t), s = std::sin(t);
            return mat2(Amp(c, 0.0), Amp(0.0, -s), Amp(0.0, -s), Amp(c, 0.0));
        }
        case GateKind::RY: {
            double t = g.params.at(0) / 2.0;
            double c = std::cos(t), s = std::sin(t);
            return mat2(Amp(c, 0.0), Amp(-s, 0.0), Amp(s, 0.0), Amp(c, 0.0));
        }
        case GateKind::CX:
            // |control target>: flips the target where the control is 1.
            return {1, 0, 0, 0,
                    0, 1, 0, 0,
                    0, 0, 0, 1,
                    0, 0, 1, 0};
        case GateKind::SWAP:
            return {1, 0, 0, 0,
                    0, 0, 1, 0,
                    0, 1, 0, 0,
                    0, 0, 0, 1};
        case GateKind::RZ:
        case GateKind::RZZ:
        case GateKind::CP:
        case GateKind::FusedDiag: {
            std::vector<Amp> d = gateDiagonal(g);
            std::vector<Amp> m(d.size() * d.size(), Amp(0.0, 0.0));
            for (size_t i = 0; i < d.size(); i++) m[i * d.size() + i] = d[i];
            return m;
        }
        case GateKind::FusedDense:
            return g.payload;
    }
    throw SimulationError("gateMatrix: unknown kind");
}

Gate makeGate(GateKind kind, std::vector<int> targets, std::vector<int> controls,
              std::vector<double> params, long id) {
    Gate g;
    g.kind = kind;
    g.targets = std::move(targets);
    g.controls = std::move(controls);
    g.params = std::move(params);
    g.id = id;
    assert(kindArity(kind) < 0 || kindArity(kind) == g.arity());
    return g;
}

}  // namespace quokka
