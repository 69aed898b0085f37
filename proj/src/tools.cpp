#include "quokka/tools.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

namespace quokka {

StateVector oracleSimulate(const Circuit& c, Index initial) {
    if (c.nQubits > 20)
        throw SimulationError("the oracle simulator is limited to 20 qubits");
    StateVector sv = initState(c.nQubits, initial);
    Index size = Index(1) << c.nQubits;
    for (const Gate& g : c.gates) {
        std::vector<Amp> m = gateMatrix(g);
        std::vector<int> qs = g.qubits();
        int k = int(qs.size());
        std::size_t dim = std::size_t(1) << k;
        Index qmask = 0;
        for (int q : qs) qmask |= Index(1) << q;
        std::vector<Amp> tmp(dim);
        for (Index base = 0; base < size; base++) {
            if (base & qmask) continue;
            for (std::size_t s = 0; s < dim; s++) {
                Index idx = base;
                for (int j = 0; j < k; j++) idx |= ((Index(s) >> (k - 1 - j)) & 1) << qs[j];
                tmp[s] = sv.amps[idx];
            }
            for (std::size_t r = 0; r < dim; r++) {
                Amp acc(0.0, 0.0);
                for (std::size_t s = 0; s < dim; s++) acc += m[r * dim + s] * tmp[s];
                Index idx = base;
                for (int j = 0; j < k; j++) idx |= ((Index(r) >> (k - 1 - j)) & 1) << qs[j];
                sv.amps[idx] = acc;
            }
        }
    }
    return sv;
}

StateVector layoutApply(const StateVector& sv, const QubitLayout& layout) {
    assert(layout.size() == sv.nQubits);
    if (layout.isIdentity()) return sv;
    StateVector out;
    out.nQubits = sv.nQubits;
    out.amps.resize(sv.amps.size());
    int n = sv.nQubits;
    for (Index i = 0; i < Index(sv.amps.size()); i++) {
        Index l = 0;
        for (int p = 0; p < n; p++) l |= ((i >> p) & 1) << layout.physToLog[p];
        out.amps[l] = sv.amps[i];
    }
    return out;
}

double fidelity(const StateVector& u, const StateVector& v) {
    if (u.amps.size() != v.amps.size())
        throw SimulationError("fidelity needs state vectors of equal size");
    Amp inner(0.0, 0.0);
    for (std::size_t i = 0; i < u.amps.size(); i++) inner += std::conj(u.amps[i]) * v.amps[i];
    return inner.real() * inner.real() + inner.imag() * inner.imag();
}

namespace {

bool sameGate(const Gate& got, const Gate& want, const std::vector<int>& gotLogical) {
    if (got.kind != want.kind) return false;
    if (got.params != want.params) return false;
    return gotLogical == want.qubits();
}

}  // namespace

OrderReport validateOrder(const Circuit& raw, const Program& p) {
    OrderReport rep;
    auto fail = [&rep](std::string msg, int qubit, long expected, long got) {
        if (!rep.ok) return;  // keep the first divergence
        rep.ok = false;
        rep.message = std::move(msg);
        rep.qubit = qubit;
        rep.expectedId = expected;
        rep.gotId = got;
    };
    if (raw.nQubits != p.nQubits) {
        fail("qubit count mismatch", -1, -1, -1);
        return rep;
    }

    std::vector<std::vector<long>> expect(raw.nQubits);
    std::unordered_map<long, const Gate*> byId;
    for (const Gate& g : raw.gates) {
        byId[g.id] = &g;
        for (int q : g.qubits()) expect[q].push_back(g.id);
    }
    std::vector<std::size_t> head(raw.nQubits, 0);
    QubitLayout layout = QubitLayout::identity(raw.nQubits);

    auto checkGate = [&](const Gate& g) {
        std::vector<int> logical;
        for (int q : g.qubits()) logical.push_back(layout.physToLog[q]);
        auto it = byId.find(g.id);
        if (it == byId.end()) {
            fail("gate id " + std::to_string(g.id) + " does not appear in the raw circuit",
                 logical.empty() ? -1 : logical[0], -1, g.id);
            return;
        }
        if (!sameGate(g, *it->second, logical)) {
            fail("gate " + std::to_string(g.id) + " differs from its raw form",
                 logical.empty() ? -1 : logical[0], g.id, g.id);
            return;
        }
        for (int q : logical) {
            if (head[q] >= expect[q].size()) {
                fail("qubit " + std::to_string(q) + " sees extra gate " + std::to_string(g.id),
                     q, -1, g.id);
                return;
            }
            if (expect[q][head[q]] != g.id) {
                fail("qubit " + std::to_string(q) + " expected gate " +
                         std::to_string(expect[q][head[q]]) + " but found " +
                         std::to_string(g.id),
                     q, expect[q][head[q]], g.id);
                return;
            }
            head[q]++;
        }
    };

    for (const ProgramItem& it : p.items) {
        if (!rep.ok) break;
        if (it.type == ProgramItem::Swap) {
            layout.applyPairs(it.swap.pairs);
            continue;
        }
        for (const Gate& g : it.block.gates) {
            if (!rep.ok) break;
            if (g.kind == GateKind::FusedDiag || g.kind == GateKind::FusedDense) {
                if (g.constituents.empty()) {
                    fail("fused gate " + std::to_string(g.id) +
                             " carries no constituent records",
                         -1, -1, g.id);
                    break;
                }
                for (const Gate& c : g.constituents) {
                    checkGate(c);
                    if (!rep.ok) break;
                }
            } else {
                checkGate(g);
            }
        }
    }
    if (rep.ok) {
        for (int q = 0; q < raw.nQubits; q++) {
            if (head[q] != expect[q].size()) {
                fail("qubit " + std::to_string(q) + " is missing gate " +
                         std::to_string(expect[q][head[q]]),
                     q, expect[q][head[q]], -1);
                break;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------- generators

Circuit genQft(int n) {
    Circuit c;
    c.nQubits = n;
    long id = 0;
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < n; i++) {
        c.gates.push_back(makeH(i, id++));
        for (int j = i + 1; j < n; j++)
            c.gates.push_back(makeCP(j, i, pi / double(Index(1) << (j - i)), id++));
    }
    return c;
}

Circuit genQaoa(int n, int layers, std::uint64_t seed) {
    Circuit c;
    c.nQubits = n;
    Rng rng(seed);
    const double twoPi = 2.0 * 3.14159265358979323846;
    long id = 0;
    for (int q = 0; q < n; q++) c.gates.push_back(makeH(q, id++));
    for (int l = 0; l < layers; l++) {
        for (int i = 0; i < n; i++)
            for (int j = i + 1; j < n; j++)
                c.gates.push_back(makeRZZ(i, j, rng.nextDouble() * twoPi, id++));
        for (int q = 0; q < n; q++)
            c.gates.push_back(makeRX(q, rng.nextDouble() * twoPi, id++));
    }
    return c;
}

Circuit genBv(int n, std::uint64_t secret) {
    if (n < 2) throw ConfigError("the hidden-string circuit needs at least 2 qubits");
    secret &= (std::uint64_t(1) << (n - 1)) - 1;
    Circuit c;
    c.nQubits = n;
    long id = 0;
    int anc = n - 1;
    c.gates.push_back(makeX(anc, id++));
    for (int q = 0; q < n; q++) c.gates.push_back(makeH(q, id++));
    for (int i = 0; i < n - 1; i++)
        if ((secret >> i) & 1) c.gates.push_back(makeCX(i, anc, id++));
    for (int q = 0; q < n - 1; q++) c.gates.push_back(makeH(q, id++));
    return c;
}

Circuit genBvAllOnes(int n) {
    return genBv(n, ~std::uint64_t(0));
}

Circuit genGateBench(GateKind kind, int n) {
    Circuit c;
    c.nQubits = n;
    const double pi = 3.14159265358979323846;
    long id = 0;
    auto angle = [&](int q) { return 2.0 * pi * double(q + 1) / double(n + 1); };
    if (kindArity(kind) == 1) {
        for (int q = 0; q < n; q++) {
            std::vector<double> params;
            if (kind == GateKind::U) params = {angle(q), angle(q) / 2.0, angle(q) / 3.0};
            else if (kindParamCount(kind) == 1) params = {angle(q)};
            c.gates.push_back(makeGate(kind, {q}, {}, params, id++));
        }
        return c;
    }
    for (int q = 0; q + 1 < n; q++) {
        std::vector<double> params;
        if (kindParamCount(kind) == 1) params = {angle(q)};
        if (kind == GateKind::CX || kind == GateKind::CP)
            c.gates.push_back(makeGate(kind, {q + 1}, {q}, params, id++));
        else
            c.gates.push_back(makeGate(kind, {q, q + 1}, {}, params, id++));
    }
    return c;
}

Circuit genRandom(int n, int gates, std::uint64_t seed) {
    static const GateKind pool[] = {GateKind::H,  GateKind::U,  GateKind::X,  GateKind::CX,
                                    GateKind::CP, GateKind::SWAP, GateKind::RX, GateKind::RY,
                                    GateKind::RZ, GateKind::RZZ};
    Circuit c;
    c.nQubits = n;
    Rng rng(seed);
    const double twoPi = 2.0 * 3.14159265358979323846;
    for (long id = 0; id < gates; id++) {
        GateKind kind;
        do {
            kind = pool[rng.nextBelow(sizeof(pool) / sizeof(pool[0]))];
        } while (n < 2 && kindArity(kind) == 2);
        std::vector<double> params;
        for (int i = 0; i < kindParamCount(kind); i++) params.push_back(rng.nextDouble() * twoPi);
        if (kindArity(kind) == 1) {
            c.gates.push_back(makeGate(kind, {int(rng.nextBelow(n))}, {}, params, id));
            continue;
        }
        int a = int(rng.nextBelow(n));
        int b = int(rng.nextBelow(n - 1));
        if (b >= a) b++;
        if (kind == GateKind::CX || kind == GateKind::CP)
            c.gates.push_back(makeGate(kind, {b}, {a}, params, id));
        else
            c.gates.push_back(makeGate(kind, {a, b}, {}, params, id));
    }
    return c;
}

}  // namespace quokka
