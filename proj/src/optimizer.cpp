#include "quokka/optimizer.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <unordered_set>

namespace quokka {

namespace {

// Order on qubit sets matching their sorted lists: {0,5} < {1,2}, and a
// proper prefix sorts before its extensions.
bool lexLessMask(std::uint64_t a, std::uint64_t b) {
    while (a && b) {
        int la = __builtin_ctzll(a), lb = __builtin_ctzll(b);
        if (la != lb) return la < lb;
        a &= a - 1;
        b &= b - 1;
    }
    return a == 0 && b != 0;
}

std::vector<int> maskToList(std::uint64_t m) {
    std::vector<int> out;
    while (m) {
        out.push_back(__builtin_ctzll(m));
        m &= m - 1;
    }
    return out;
}

std::uint64_t listToMask(const std::vector<int>& qs) {
    std::uint64_t m = 0;
    for (int q : qs) m |= std::uint64_t(1) << q;
    return m;
}

// Number of gates the frontier closure would consume for this chunk. Gates
// are scanned in order; a gate outside the chunk blocks its qubits, and once
// every chunk qubit is blocked nothing later can join.
int cascadeCount(const std::vector<std::uint64_t>& masks, std::uint64_t cand) {
    std::uint64_t blocked = 0;
    int count = 0;
    for (std::uint64_t m : masks) {
        if ((m & ~cand) == 0 && (m & blocked) == 0) {
            count++;
        } else {
            blocked |= m;
            if ((blocked & cand) == cand) break;
        }
    }
    return count;
}

std::uint64_t padMask(std::uint64_t chunk, int chunkSize, int nQubits,
                      const std::vector<int>& residents) {
    for (int q : residents) {
        if (popcount64(chunk) >= chunkSize) return chunk;
        chunk |= std::uint64_t(1) << q;
    }
    for (int q = 0; q < nQubits; q++) {
        if (popcount64(chunk) >= chunkSize) return chunk;
        chunk |= std::uint64_t(1) << q;
    }
    return chunk;
}

// Consume the frontier closure of chunkMask from gates[] (done[] updated).
std::vector<Gate> consumeClosure(const std::vector<Gate>& gates, std::vector<char>& done,
                                 std::uint64_t chunkMask) {
    std::vector<Gate> taken;
    std::uint64_t blocked = 0;
    for (std::size_t i = 0; i < gates.size(); i++) {
        if (done[i]) continue;
        std::uint64_t m = gates[i].depMask();
        if ((m & ~chunkMask) == 0 && (m & blocked) == 0) {
            done[i] = 1;
            taken.push_back(gates[i]);
        } else {
            blocked |= m;
            if ((blocked & chunkMask) == chunkMask) break;
        }
    }
    return taken;
}

std::vector<Gate> pendingOf(const std::vector<Gate>& gates, const std::vector<char>& done) {
    std::vector<Gate> out;
    for (std::size_t i = 0; i < gates.size(); i++)
        if (!done[i]) out.push_back(gates[i]);
    return out;
}

std::vector<std::uint64_t> masksOf(const std::vector<Gate>& gates) {
    std::vector<std::uint64_t> out;
    out.reserve(gates.size());
    for (const Gate& g : gates) out.push_back(g.depMask());
    return out;
}

Gate toPhysical(const Gate& g, const QubitLayout& layout, int bound) {
    Gate out = g;
    for (int& q : out.targets) q = layout.logToPhys[q];
    for (int& q : out.controls) q = layout.logToPhys[q];
    for (Gate& c : out.constituents) c = toPhysical(c, layout, bound);
    for (int q : out.qubits())
        if (q >= bound)
            throw SimulationError("gate " + std::to_string(g.id) +
                                  " landed outside the chunk after layout mapping");
    return out;
}

int bitOf(Index value, int pos) { return int((value >> pos) & 1); }

}  // namespace

std::vector<int> findMaxGate(const std::vector<Gate>& pending, int nQubits, int chunkSize,
                             const std::vector<int>& residents) {
    assert(nQubits <= 64);
    chunkSize = std::min(chunkSize, nQubits);
    std::vector<std::uint64_t> masks;
    masks.reserve(pending.size());
    for (const Gate& g : pending) masks.push_back(g.depMask());

    std::uint64_t chunk = 0;
    while (popcount64(chunk) < chunkSize) {
        std::vector<std::uint64_t> cands;
        std::unordered_set<std::uint64_t> seen;
        for (std::uint64_t m : masks) {
            std::uint64_t u = m | chunk;
            if (u == chunk || popcount64(u) > chunkSize) continue;
            if (seen.insert(u).second) cands.push_back(u);
        }
        if (cands.empty()) break;
        std::uint64_t best = 0;
        int bestScore = -1;
        for (std::uint64_t u : cands) {
            int s = cascadeCount(masks, u);
            if (s > bestScore || (s == bestScore && lexLessMask(u, best))) {
                best = u;
                bestScore = s;
            }
        }
        chunk = best;
    }
    return maskToList(padMask(chunk, chunkSize, nQubits, residents));
}

std::vector<SwapOp> insertQubitSwaps(const std::vector<int>& chunkSet, QubitLayout& layout,
                                     const Config& cfg) {
    int chunk = cfg.chunkQubits;
    int region = cfg.rankRegion();
    assert(int(chunkSet.size()) <= chunk);
    std::vector<char> wanted(layout.size(), 0);
    for (int q : chunkSet) {
        assert(q >= 0 && q < layout.size());
        wanted[q] = 1;
    }
    std::vector<SwapOp> ops;

    // Wanted qubits sitting in the rank bits come in through a staged
    // in/cross/in triple using the highest in-rank positions, so the qubits
    // parked there end up back where they started.
    std::vector<int> rankIn;
    for (int p = region; p < layout.size(); p++)
        if (wanted[layout.physToLog[p]]) rankIn.push_back(p);
    if (!rankIn.empty()) {
        int s = int(rankIn.size());
        std::vector<int> evict;
        for (int p = region - 1; p >= 0 && int(evict.size()) < s; p--)
            if (!wanted[layout.physToLog[p]]) evict.push_back(p);
        if (int(evict.size()) < s)
            throw SimulationError("no in-rank positions left to trade for the rank bits");
        std::sort(evict.begin(), evict.end());
        std::vector<int> stage;
        for (int p = region - s; p < region; p++) stage.push_back(p);

        std::vector<int> outSide, inSide;
        std::set_difference(evict.begin(), evict.end(), stage.begin(), stage.end(),
                            std::back_inserter(outSide));
        std::set_difference(stage.begin(), stage.end(), evict.begin(), evict.end(),
                            std::back_inserter(inSide));
        SwapOp pre;
        pre.kind = SwapOp::InMemory;
        for (std::size_t i = 0; i < outSide.size(); i++)
            pre.pairs.emplace_back(outSide[i], inSide[i]);

        SwapOp cross;
        cross.kind = SwapOp::CrossRank;
        for (int i = 0; i < s; i++) cross.pairs.emplace_back(stage[i], rankIn[i]);

        if (!pre.pairs.empty()) {
            layout.applyPairs(pre.pairs);
            ops.push_back(pre);
        }
        layout.applyPairs(cross.pairs);
        ops.push_back(cross);
        if (!pre.pairs.empty()) {
            layout.applyPairs(pre.pairs);
            ops.push_back(pre);
        }
    }

    // Plain fill: wanted qubits above the chunk swap into the lowest
    // non-wanted chunk positions.
    std::vector<int> outer, slots;
    for (int p = chunk; p < region; p++)
        if (wanted[layout.physToLog[p]]) outer.push_back(p);
    for (int p = 0; p < chunk; p++)
        if (!wanted[layout.physToLog[p]]) slots.push_back(p);
    assert(outer.size() <= slots.size());
    if (!outer.empty()) {
        SwapOp fill;
        fill.kind = SwapOp::InMemory;
        for (std::size_t i = 0; i < outer.size(); i++) fill.pairs.emplace_back(slots[i], outer[i]);
        layout.applyPairs(fill.pairs);
        ops.push_back(fill);
    }
    return ops;
}

Circuit fuseDiagonal(const Circuit& c, const Config& cfg) {
    struct Group {
        std::uint64_t unionMask = 0;
        std::uint64_t blockedMask = 0;
        std::vector<std::size_t> members;
    };
    int cap = cfg.chunkQubits;
    int region = cfg.rankRegion();
    std::uint64_t regionMask =
        region >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << region) - 1;

    std::vector<Group> groups;
    std::vector<int> groupOf(c.gates.size(), -1);
    for (std::size_t i = 0; i < c.gates.size(); i++) {
        const Gate& g = c.gates[i];
        std::uint64_t m = g.depMask();
        if (!isDiagonal(g)) {
            for (Group& grp : groups) grp.blockedMask |= m;
            continue;
        }
        if ((m & ~regionMask) != 0) {  // touches the rank bits, stays put
            for (Group& grp : groups) grp.blockedMask |= m;
            continue;
        }
        int home = -1;
        for (std::size_t j = 0; j < groups.size(); j++) {
            if (popcount64(groups[j].unionMask | m) <= cap &&
                (m & groups[j].blockedMask) == 0) {
                home = int(j);
                break;
            }
        }
        if (home < 0) {
            Group grp;
            grp.unionMask = m;
            grp.members.push_back(i);
            groups.push_back(grp);
            home = int(groups.size()) - 1;
        } else {
            groups[home].unionMask |= m;
            groups[home].members.push_back(i);
        }
        groupOf[i] = home;
        // A gate landing here executes at this group's anchor. Anything that
        // later shares one of its qubits must not join an earlier-anchored
        // group, or the two would run out of per-qubit order.
        for (int j = 0; j < home; j++) groups[j].blockedMask |= m;
    }

    Circuit out;
    out.nQubits = c.nQubits;
    for (std::size_t i = 0; i < c.gates.size(); i++) {
        int gi = groupOf[i];
        if (gi < 0 || groups[gi].members.size() < 2) {
            out.gates.push_back(c.gates[i]);
            continue;
        }
        const Group& grp = groups[gi];
        if (grp.members.front() != i) continue;  // merged into the earlier anchor

        Gate fused;
        fused.kind = GateKind::FusedDiag;
        fused.targets = maskToList(grp.unionMask);
        int k = int(fused.targets.size());
        fused.payload.assign(std::size_t(1) << k, Amp(1.0, 0.0));
        long minId = -1;
        for (std::size_t mi : grp.members) {
            const Gate& mem = c.gates[mi];
            fused.constituents.push_back(mem);
            if (minId < 0 || mem.id < minId) minId = mem.id;
            std::vector<Amp> d = gateDiagonal(mem);
            std::vector<int> qs = mem.qubits();
            for (Index idx = 0; idx < fused.payload.size(); idx++) {
                Index sub = 0;
                for (int q : qs) {
                    int j = int(std::lower_bound(fused.targets.begin(), fused.targets.end(), q) -
                                fused.targets.begin());
                    sub = (sub << 1) | bitOf(idx, k - 1 - j);  // first listed qubit is the MSB
                }
                fused.payload[idx] *= d[sub];
            }
        }
        fused.id = minId;
        out.gates.push_back(std::move(fused));
    }
    return out;
}

namespace {

Gate buildFusedDense(const std::vector<Gate>& members) {
    std::uint64_t u = 0;
    for (const Gate& g : members) u |= g.depMask();
    std::vector<int> targets = maskToList(u);
    int k = int(targets.size());
    std::size_t dim = std::size_t(1) << k;

    std::vector<Amp> mat(dim * dim, Amp(0.0, 0.0));
    for (std::size_t i = 0; i < dim; i++) mat[i * dim + i] = Amp(1.0, 0.0);

    for (const Gate& g : members) {
        std::vector<Amp> m = gateMatrix(g);
        std::vector<int> qs = g.qubits();
        int a = int(qs.size());
        std::size_t subDim = std::size_t(1) << a;
        // Bit position of each gate qubit inside the fused row index
        // (first listed qubit is the sub-index MSB).
        std::vector<int> pos(a);
        for (int t = 0; t < a; t++) {
            int j = int(std::lower_bound(targets.begin(), targets.end(), qs[t]) -
                        targets.begin());
            pos[t] = k - 1 - j;
        }
        std::vector<Amp> next(dim * dim, Amp(0.0, 0.0));
        for (std::size_t r = 0; r < dim; r++) {
            std::size_t subRow = 0;
            for (int t = 0; t < a; t++) subRow = (subRow << 1) | bitOf(r, pos[t]);
            for (std::size_t sc = 0; sc < subDim; sc++) {
                std::size_t rc = r;
                for (int t = 0; t < a; t++) {
                    Index bit = (sc >> (a - 1 - t)) & 1;
                    rc = (rc & ~(std::size_t(1) << pos[t])) | (bit << pos[t]);
                }
                Amp e = m[subRow * subDim + sc];
                if (e == Amp(0.0, 0.0)) continue;
                for (std::size_t col = 0; col < dim; col++)
                    next[r * dim + col] += e * mat[rc * dim + col];
            }
        }
        mat.swap(next);
    }

    Gate fused;
    fused.kind = GateKind::FusedDense;
    fused.targets = std::move(targets);
    fused.payload = std::move(mat);
    fused.constituents = members;
    long minId = -1;
    for (const Gate& g : members)
        if (minId < 0 || g.id < minId) minId = g.id;
    fused.id = minId;
    return fused;
}

}  // namespace

std::vector<Gate> fuseGeneral(const std::vector<Gate>& blockGates, int fusionQubits) {
    std::vector<Gate> out;
    std::vector<Gate> run;
    std::uint64_t runMask = 0;
    auto flush = [&]() {
        if (run.size() >= 2)
            out.push_back(buildFusedDense(run));
        else
            for (Gate& g : run) out.push_back(std::move(g));
        run.clear();
        runMask = 0;
    };
    for (const Gate& g : blockGates) {
        if (g.kind == GateKind::FusedDiag) {  // keep merged diagonals intact
            flush();
            out.push_back(g);
            continue;
        }
        std::uint64_t m = g.depMask();
        if (!run.empty() && popcount64(runMask | m) > fusionQubits) flush();
        run.push_back(g);
        runMask |= m;
    }
    flush();
    return out;
}

Program findGbs(const Circuit& c, const Config& cfg, int chunkSize, bool isFusion) {
    if (c.nQubits != cfg.totalQubits)
        throw ConfigError("circuit has " + std::to_string(c.nQubits) +
                          " qubits but the config says " + std::to_string(cfg.totalQubits));
    int region = cfg.rankRegion();
    if (chunkSize < 1 || chunkSize > region)
        throw ConfigError("chunk size must be in [1, total_qbit - rank_qbit]");
    for (const Gate& g : c.gates)
        if (g.arity() > chunkSize)
            throw SimulationError("gate " + std::to_string(g.id) + " spans " +
                                  std::to_string(g.arity()) +
                                  " qubits, more than the chunk holds");

    int n = c.nQubits;
    Config cacheCfg = cfg;
    cacheCfg.chunkQubits = chunkSize;

    Program p;
    p.nQubits = n;
    p.rankQubits = cfg.rankQubits;
    p.chunkQubits = chunkSize;
    QubitLayout layout = QubitLayout::identity(n);

    std::vector<char> devDone(c.gates.size(), 0);
    std::size_t devRemaining = c.gates.size();
    while (devRemaining > 0) {
        std::vector<Gate> segGates;
        if (cfg.rankQubits == 0) {
            segGates = c.gates;
            std::fill(devDone.begin(), devDone.end(), 1);
            devRemaining = 0;
        } else {
            std::vector<int> residents;
            for (int pos = 0; pos < region; pos++) residents.push_back(layout.physToLog[pos]);
            std::sort(residents.begin(), residents.end());
            std::vector<Gate> pend = pendingOf(c.gates, devDone);
            std::uint64_t devMask;
            std::uint64_t resMask = listToMask(residents);
            if (!cfg.xrsEnabled)
                devMask = padMask(pend.front().depMask(), region, n, residents);
            else if (cascadeCount(masksOf(pend), resMask) > 0)
                devMask = resMask;  // the current occupants still have work: no traffic
            else
                devMask = listToMask(findMaxGate(pend, n, region, residents));
            segGates = consumeClosure(c.gates, devDone, devMask);
            assert(!segGates.empty());
            devRemaining -= segGates.size();
        }

        std::vector<char> done(segGates.size(), 0);
        std::size_t remaining = segGates.size();
        while (remaining > 0) {
            std::vector<int> residents;
            for (int pos = 0; pos < chunkSize; pos++) residents.push_back(layout.physToLog[pos]);
            std::sort(residents.begin(), residents.end());
            std::vector<Gate> pend = pendingOf(segGates, done);
            std::vector<int> chunkSet;
            if (!cfg.imsEnabled)
                chunkSet = maskToList(padMask(pend.front().depMask(), chunkSize, n, residents));
            else if (cascadeCount(masksOf(pend), listToMask(residents)) > 0)
                chunkSet = residents;  // swap-free block first
            else
                chunkSet = findMaxGate(pend, n, chunkSize, residents);

            std::vector<SwapOp> swaps = insertQubitSwaps(chunkSet, layout, cacheCfg);
            std::vector<Gate> taken = consumeClosure(segGates, done, listToMask(chunkSet));
            assert(!taken.empty());
            remaining -= taken.size();

            GateBlock blk;
            blk.chunkSet = chunkSet;
            for (const Gate& g : taken) blk.gates.push_back(toPhysical(g, layout, chunkSize));
            if (isFusion) blk.gates = fuseGeneral(blk.gates, cfg.fusionQubits);

            for (SwapOp& s : swaps) p.items.push_back(ProgramItem::makeSwap(std::move(s)));
            p.items.push_back(ProgramItem::makeBlock(std::move(blk)));
        }
    }
    p.finalLayout = layout;
    return p;
}

Program aioOptimize(const Circuit& c, const Config& cfg) {
    const Circuit& work = c;
    if (cfg.diagonalFusionEnabled) {
        Circuit merged = fuseDiagonal(c, cfg);
        return findGbs(merged, cfg, cfg.chunkQubits, cfg.fusionEnabled);
    }
    return findGbs(work, cfg, cfg.chunkQubits, cfg.fusionEnabled);
}

}  // namespace quokka
