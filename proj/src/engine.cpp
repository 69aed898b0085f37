#include "quokka/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <thread>

#include "quokka/kernels.hpp"

namespace quokka {

double StateVector::norm() const {
    double s = 0.0;
    for (const Amp& a : amps) s += a.real() * a.real() + a.imag() * a.imag();
    return s;
}

StateVector initState(int nQubits, Index initial) {
    if (nQubits < 1 || nQubits > 40)
        throw SimulationError("qubit count " + std::to_string(nQubits) + " out of range");
    Index size = Index(1) << nQubits;
    if (initial >= size) throw SimulationError("initial basis state out of range");
    StateVector sv;
    sv.nQubits = nQubits;
    sv.amps.assign(size, Amp(0.0, 0.0));
    sv.amps[initial] = Amp(1.0, 0.0);
    return sv;
}

Index bitswap(Index x, const std::vector<std::pair<int, int>>& pairs) {
    for (const auto& [p, q] : pairs) {
        Index b1 = (x >> p) & 1, b2 = (x >> q) & 1;
        if (b1 != b2) x ^= (Index(1) << p) | (Index(1) << q);
    }
    return x;
}

namespace {

// Pairs that cross the cache-line boundary get their in-position pre-swapped
// with a spare low position, so the traversal below CL stays dense.
std::vector<std::pair<int, int>> shiftPairs(const std::vector<std::pair<int, int>>& pairs,
                                            int cacheLineQubits) {
    std::vector<int> ins;
    for (const auto& [a, b] : pairs) {
        int lo = std::min(a, b), hi = std::max(a, b);
        if (lo < cacheLineQubits && hi >= cacheLineQubits) ins.push_back(hi);
    }
    std::sort(ins.begin(), ins.end());
    std::vector<int> line;
    for (std::size_t j = 0; j < ins.size(); j++) line.push_back(cacheLineQubits + int(j));
    std::vector<int> lineOnly, insOnly;
    std::set_difference(line.begin(), line.end(), ins.begin(), ins.end(),
                        std::back_inserter(lineOnly));
    std::set_difference(ins.begin(), ins.end(), line.begin(), line.end(),
                        std::back_inserter(insOnly));
    std::vector<std::pair<int, int>> out;
    for (std::size_t j = 0; j < lineOnly.size(); j++) out.emplace_back(lineOnly[j], insOnly[j]);
    return out;
}

// Split [0, total) into `threads` contiguous spans and run f(lo, hi) on each.
template <class F>
void runSpans(int threads, Index total, F f) {
    if (threads <= 1 || total < Index(threads) * 2) {
        f(Index(0), total);
        return;
    }
    Index per = (total + Index(threads) - 1) / Index(threads);
    std::vector<std::thread> ts;
    for (int t = 1; t < threads; t++) {
        Index lo = std::min(total, per * Index(t));
        Index hi = std::min(total, per * Index(t + 1));
        if (lo < hi) ts.emplace_back(f, lo, hi);
    }
    f(Index(0), std::min(total, per));
    for (auto& th : ts) th.join();
}

}  // namespace

Index bitshift(Index t, const std::vector<std::pair<int, int>>& pairs, int cacheLineQubits) {
    return bitswap(t, shiftPairs(pairs, cacheLineQubits));
}

void imsSwap(StateVector& sv, const SwapOp& op, int cacheLineQubits, int threads) {
    if (op.pairs.empty()) return;
    std::vector<std::pair<int, int>> sp = shiftPairs(op.pairs, cacheLineQubits);
    Index size = Index(sv.amps.size());
    Amp* amps = sv.amps.data();
    const auto& pairs = op.pairs;
    runSpans(threads, size, [&](Index lo, Index hi) {
        for (Index t = lo; t < hi; t++) {
            Index m = bitswap(t, sp);
            Index n = bitswap(m, pairs);
            // Each unordered pair is visited from both sides; the larger
            // index does the exchange, so every orbit is touched once.
            if (m > n) std::swap(amps[m], amps[n]);
        }
    });
}

namespace {

// Everything a gate needs that does not depend on the amplitudes it touches:
// matrices, diagonals, bit masks, and the fused-dense sub-index scatter.
// Computed once per gate so the chunk loop never re-derives or allocates.
struct PreparedGate {
    GateKind kind;
    int q0 = 0, q1 = 0;
    std::size_t bitA = 0, bitB = 0;
    double m[8] = {0};
    double d[8] = {0};
    const Gate* gate = nullptr;  // fused kinds read payload/targets in place
    int k = 0;
    std::size_t dim = 0;
    std::size_t qmask = 0;
    std::vector<std::size_t> subOff;
};

PreparedGate prepareGate(const Gate& g) {
    PreparedGate p;
    p.kind = g.kind;
    switch (g.kind) {
        case GateKind::H:
        case GateKind::U:
        case GateKind::X:
        case GateKind::RX:
        case GateKind::RY: {
            std::vector<Amp> mat = gateMatrix(g);
            for (int i = 0; i < 4; i++) {
                p.m[2 * i] = mat[i].real();
                p.m[2 * i + 1] = mat[i].imag();
            }
            p.q0 = g.targets[0];
            break;
        }
        case GateKind::RZ: {
            std::vector<Amp> dg = gateDiagonal(g);
            p.d[0] = dg[0].real();
            p.d[1] = dg[0].imag();
            p.d[2] = dg[1].real();
            p.d[3] = dg[1].imag();
            p.q0 = g.targets[0];
            break;
        }
        case GateKind::CP:
        case GateKind::RZZ: {
            std::vector<Amp> dg = gateDiagonal(g);
            for (int i = 0; i < 4; i++) {
                p.d[2 * i] = dg[i].real();
                p.d[2 * i + 1] = dg[i].imag();
            }
            std::vector<int> qs = g.qubits();
            p.q0 = qs[0];
            p.q1 = qs[1];
            break;
        }
        case GateKind::CX:
            p.bitA = std::size_t(1) << g.controls[0];
            p.bitB = std::size_t(1) << g.targets[0];
            break;
        case GateKind::SWAP:
            p.bitA = std::size_t(1) << g.targets[0];
            p.bitB = std::size_t(1) << g.targets[1];
            break;
        case GateKind::FusedDiag:
            p.gate = &g;
            p.k = int(g.targets.size());
            break;
        case GateKind::FusedDense: {
            p.gate = &g;
            p.k = int(g.targets.size());
            p.dim = std::size_t(1) << p.k;
            for (int q : g.targets) p.qmask |= std::size_t(1) << q;
            p.subOff.resize(p.dim);
            for (std::size_t s = 0; s < p.dim; s++) {
                std::size_t off = 0;
                for (int j = 0; j < p.k; j++)
                    off |= ((s >> (p.k - 1 - j)) & 1) << g.targets[j];
                p.subOff[s] = off;
            }
            break;
        }
    }
    return p;
}

void applyPrepared(Amp* data, std::size_t n, const PreparedGate& p, const kern::Kernels& kern) {
    double* a = reinterpret_cast<double*>(data);
    switch (p.kind) {
        case GateKind::H:
        case GateKind::U:
        case GateKind::X:
        case GateKind::RX:
        case GateKind::RY:
            kern.apply1(a, n, p.q0, p.m);
            return;
        case GateKind::RZ:
            kern.diag1(a, n, p.q0, p.d);
            return;
        case GateKind::CP:
        case GateKind::RZZ:
            kern.diag2(a, n, p.q0, p.q1, p.d);
            return;
        case GateKind::CX:
            for (std::size_t i = 0; i < n; i++)
                if ((i & p.bitA) && !(i & p.bitB)) std::swap(data[i], data[i | p.bitB]);
            return;
        case GateKind::SWAP:
            for (std::size_t i = 0; i < n; i++)
                if ((i & p.bitA) && !(i & p.bitB)) std::swap(data[i], data[i ^ p.bitA ^ p.bitB]);
            return;
        case GateKind::FusedDiag: {
            const std::vector<int>& qs = p.gate->targets;
            int k = p.k;
            const Amp* payload = p.gate->payload.data();
            for (std::size_t i = 0; i < n; i++) {
                std::size_t sub = 0;
                for (int j = 0; j < k; j++) sub |= ((i >> qs[j]) & 1) << (k - 1 - j);
                const Amp& c = payload[sub];
                double x = a[2 * i], y = a[2 * i + 1];
                a[2 * i] = x * c.real() - y * c.imag();
                a[2 * i + 1] = y * c.real() + x * c.imag();
            }
            return;
        }
        case GateKind::FusedDense: {
            const Amp* payload = p.gate->payload.data();
            const std::size_t dim = p.dim;
            const std::size_t* subOff = p.subOff.data();
            thread_local std::vector<Amp> tmp, res;
            tmp.resize(dim);
            res.resize(dim);
            for (std::size_t base = 0; base < n; base++) {
                if (base & p.qmask) continue;
                for (std::size_t s = 0; s < dim; s++) tmp[s] = data[base | subOff[s]];
                for (std::size_t r = 0; r < dim; r++) {
                    double sr = 0.0, si = 0.0;
                    const Amp* row = payload + r * dim;
                    for (std::size_t s = 0; s < dim; s++) {
                        double x = tmp[s].real(), y = tmp[s].imag();
                        sr += x * row[s].real() - y * row[s].imag();
                        si += y * row[s].real() + x * row[s].imag();
                    }
                    res[r] = Amp(sr, si);
                }
                for (std::size_t r = 0; r < dim; r++) data[base | subOff[r]] = res[r];
            }
            return;
        }
    }
    throw SimulationError("unhandled gate kind");
}

}  // namespace

void applyGate(StateVector& sv, const Gate& g) {
    applyPrepared(sv.amps.data(), sv.amps.size(), prepareGate(g), kern::activeKernels());
}

void applyBlock(StateVector& sv, const GateBlock& block, int chunkQubits, int threads) {
    assert(chunkQubits <= sv.nQubits);
    for (const Gate& g : block.gates)
        for (int q : g.qubits())
            if (q >= chunkQubits)
                throw SimulationError("block gate " + std::to_string(g.id) +
                                      " reaches outside the chunk");
    std::size_t chunkLen = std::size_t(1) << chunkQubits;
    Index chunks = Index(sv.amps.size()) >> chunkQubits;
    Amp* data = sv.amps.data();
    const kern::Kernels& kern = kern::activeKernels();
    std::vector<PreparedGate> prepped;
    prepped.reserve(block.gates.size());
    for (const Gate& g : block.gates) prepped.push_back(prepareGate(g));
    runSpans(threads, chunks, [&](Index lo, Index hi) {
        for (Index c = lo; c < hi; c++)
            for (const PreparedGate& p : prepped)
                applyPrepared(data + c * chunkLen, chunkLen, p, kern);
    });
}

SimResult simulateProgram(const Program& p, const Config& cfg, Index initial, int threads) {
    threads = resolveThreads(threads);
    StateVector sv = initState(p.nQubits, initial);
    for (const ProgramItem& it : p.items) {
        if (it.type == ProgramItem::Block) {
            applyBlock(sv, it.block, p.chunkQubits, threads);
        } else if (it.swap.kind == SwapOp::InMemory) {
            imsSwap(sv, it.swap, cfg.cacheLineQubits, threads);
        } else {
            throw SimulationError(
                "cross-rank swap in a single-rank run; use the multi-rank engine");
        }
    }
    return SimResult{std::move(sv), p.finalLayout};
}

StateVector simulateGateByGate(const Circuit& c, Index initial, int threads) {
    threads = resolveThreads(threads);
    StateVector sv = initState(c.nQubits, initial);
    int spanThreads = 1;
    while (spanThreads * 2 <= threads) spanThreads *= 2;
    const kern::Kernels& kern = kern::activeKernels();
    for (const Gate& g : c.gates) {
        int maxPos = 0;
        for (int q : g.qubits()) maxPos = std::max(maxPos, q);
        Index spans = Index(spanThreads);
        std::size_t spanLen = sv.amps.size() / spans;
        PreparedGate p = prepareGate(g);
        if (spanThreads > 1 && (std::size_t(1) << (maxPos + 1)) <= spanLen) {
            Amp* data = sv.amps.data();
            runSpans(spanThreads, spans, [&](Index lo, Index hi) {
                for (Index s = lo; s < hi; s++)
                    applyPrepared(data + s * spanLen, spanLen, p, kern);
            });
        } else {
            applyPrepared(sv.amps.data(), sv.amps.size(), p, kern);
        }
    }
    return sv;
}

int resolveThreads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QUOKKA_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

}  // namespace quokka
