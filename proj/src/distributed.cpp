#include "quokka/distributed.hpp"

#include <algorithm>
#include <barrier>
#include <thread>

namespace quokka {

Index rankSliceBase(int rank, const Config& cfg) {
    return Index(rank) << cfg.rankRegion();
}

StateVector gatherState(const std::vector<std::vector<Amp>>& slices, int nQubits) {
    StateVector sv;
    sv.nQubits = nQubits;
    sv.amps.reserve(Index(1) << nQubits);
    for (const auto& s : slices) sv.amps.insert(sv.amps.end(), s.begin(), s.end());
    if (sv.amps.size() != (Index(1) << nQubits))
        throw SimulationError("gathered slices do not form a full state vector");
    return sv;
}

namespace {

struct XrsPlan {
    std::vector<int> outs;    // in-rank positions, ascending
    std::vector<int> insRel;  // rank-bit positions minus the region width
    std::vector<int> offPos;  // in-rank positions not swapped (offset bits)
    int s = 0;
    Index slabOffsets = 0;  // amplitudes per slab
    Index window = 0;       // offsets moved per round and slab
    std::size_t roundCount = 0;
};

XrsPlan planXrs(const SwapOp& op, const Config& cfg) {
    if (op.kind != SwapOp::CrossRank)
        throw SimulationError("xrsSwap needs a cross-rank swap op");
    int region = cfg.rankRegion();
    XrsPlan plan;
    for (const auto& [o, i] : op.pairs) {
        if (o < 0 || o >= region || i < region || i >= cfg.totalQubits)
            throw SimulationError("cross-rank swap positions out of range");
        plan.outs.push_back(o);
        plan.insRel.push_back(i - region);
    }
    plan.s = int(op.pairs.size());
    if (cfg.bufferQubits < plan.s)
        throw SimulationError("exchange buffer smaller than one amplitude per slab");
    for (int p = 0; p < region; p++)
        if (std::find(plan.outs.begin(), plan.outs.end(), p) == plan.outs.end())
            plan.offPos.push_back(p);
    plan.slabOffsets = Index(1) << (region - plan.s);
    plan.window = std::min(plan.slabOffsets, Index(1) << (cfg.bufferQubits - plan.s));
    plan.roundCount = std::size_t((plan.slabOffsets + plan.window - 1) / plan.window);
    return plan;
}

int insBitsOf(int rank, const XrsPlan& plan) {
    int p = 0;
    for (std::size_t j = 0; j < plan.insRel.size(); j++)
        p |= ((rank >> plan.insRel[j]) & 1) << j;
    return p;
}

Index slabIndex(const XrsPlan& plan, Index offset, int slab) {
    Index l = 0;
    for (int j = 0; j < plan.s; j++) l |= Index((slab >> j) & 1) << plan.outs[j];
    for (std::size_t idx = 0; idx < plan.offPos.size(); idx++)
        l |= ((offset >> idx) & 1) << plan.offPos[idx];
    return l;
}

// Stage this round's window of every outgoing slab into the rank's buffer,
// ordered by destination slab. The slab matching the rank's own swapped-in
// bits maps to itself and moves nothing.
void xrsFill(const XrsPlan& plan, const std::vector<Amp>& slice, int rank, Index w0,
             std::vector<Amp>& buf, RankStats* st) {
    int own = insBitsOf(rank, plan);
    Index cnt = std::min(plan.window, plan.slabOffsets - w0);
    int slabs = 1 << plan.s;
    buf.resize(std::size_t(slabs - 1) * cnt);
    std::size_t at = 0;
    for (int p = 0; p < slabs; p++) {
        if (p == own) continue;
        for (Index o = w0; o < w0 + cnt; o++) buf[at++] = slice[slabIndex(plan, o, p)];
    }
    if (st) {
        std::size_t bytes = at * sizeof(Amp);
        st->bytesSent += bytes;
        st->peakBufferBytes = std::max(st->peakBufferBytes, buf.size() * sizeof(Amp));
        st->rounds++;
        st->perRound.emplace_back(bytes, 0);
    }
}

// Pull this round's windows out of every partner's buffer into the slice.
void xrsDeliver(const XrsPlan& plan, std::vector<Amp>& slice, int rank, Index w0,
                const std::vector<std::vector<Amp>>& sendBuf, RankStats* st) {
    int own = insBitsOf(rank, plan);
    Index cnt = std::min(plan.window, plan.slabOffsets - w0);
    int slabs = 1 << plan.s;
    std::size_t got = 0;
    for (int pa = 0; pa < slabs; pa++) {
        if (pa == own) continue;
        int partner = rank;
        for (std::size_t j = 0; j < plan.insRel.size(); j++) {
            partner &= ~(1 << plan.insRel[j]);
            partner |= ((pa >> j) & 1) << plan.insRel[j];
        }
        // The partner's buffer section addressed to us holds our slab id.
        std::size_t section = std::size_t(own - (own > pa ? 1 : 0)) * cnt;
        const Amp* src = sendBuf[partner].data() + section;
        for (Index o = w0; o < w0 + cnt; o++) slice[slabIndex(plan, o, pa)] = src[o - w0];
        got += cnt * sizeof(Amp);
    }
    if (st && !st->perRound.empty()) {
        st->bytesReceived += got;
        st->perRound.back().second = got;
    }
}

}  // namespace

void xrsSwap(std::vector<std::vector<Amp>>& slices, const SwapOp& op, const Config& cfg,
             std::vector<RankStats>* stats) {
    XrsPlan plan = planXrs(op, cfg);
    int numRanks = 1 << cfg.rankQubits;
    if (int(slices.size()) != numRanks)
        throw SimulationError("slice count does not match the rank count");
    if (stats && int(stats->size()) != numRanks) stats->resize(numRanks);
    std::vector<std::vector<Amp>> sendBuf(numRanks);
    for (Index w0 = 0; w0 < plan.slabOffsets; w0 += plan.window) {
        for (int r = 0; r < numRanks; r++)
            xrsFill(plan, slices[r], r, w0, sendBuf[r], stats ? &(*stats)[r] : nullptr);
        for (int r = 0; r < numRanks; r++)
            xrsDeliver(plan, slices[r], r, w0, sendBuf, stats ? &(*stats)[r] : nullptr);
    }
}

MultiRankResult spawnRanks(const Program& p, const Config& cfg, Index initial) {
    if (p.nQubits != cfg.totalQubits || p.rankQubits != cfg.rankQubits)
        throw ConfigError("program and config disagree on the qubit split");
    int region = cfg.rankRegion();
    int numRanks = 1 << cfg.rankQubits;
    Index sliceLen = Index(1) << region;
    if (initial >= (Index(1) << p.nQubits))
        throw SimulationError("initial basis state out of range");

    // Validate every item up front so the workers cannot throw mid-barrier.
    for (const ProgramItem& it : p.items) {
        if (it.type == ProgramItem::Block) {
            for (const Gate& g : it.block.gates)
                for (int q : g.qubits())
                    if (q < 0 || q >= p.chunkQubits)
                        throw SimulationError("block gate " + std::to_string(g.id) +
                                              " reaches outside the chunk");
        } else if (it.swap.kind == SwapOp::InMemory) {
            for (const auto& [a, b] : it.swap.pairs)
                if (a < 0 || b < 0 || a >= region || b >= region)
                    throw SimulationError("in-memory swap reaches into the rank bits");
        } else {
            planXrs(it.swap, cfg);
        }
    }

    std::vector<std::vector<Amp>> slices(numRanks);
    for (auto& s : slices) s.assign(sliceLen, Amp(0.0, 0.0));
    slices[initial >> region][initial & (sliceLen - 1)] = Amp(1.0, 0.0);

    std::vector<RankStats> stats(numRanks);
    std::vector<std::vector<Amp>> sendBuf(numRanks);
    std::barrier<> bar(numRanks);

    auto worker = [&](int rank) {
        StateVector local;
        local.nQubits = region;
        local.amps = std::move(slices[rank]);
        for (const ProgramItem& it : p.items) {
            if (it.type == ProgramItem::Block) {
                applyBlock(local, it.block, p.chunkQubits, 1);
            } else if (it.swap.kind == SwapOp::InMemory) {
                imsSwap(local, it.swap, cfg.cacheLineQubits, 1);
            } else {
                XrsPlan plan = planXrs(it.swap, cfg);
                for (Index w0 = 0; w0 < plan.slabOffsets; w0 += plan.window) {
                    xrsFill(plan, local.amps, rank, w0, sendBuf[rank], &stats[rank]);
                    bar.arrive_and_wait();
                    xrsDeliver(plan, local.amps, rank, w0, sendBuf, &stats[rank]);
                    bar.arrive_and_wait();
                }
            }
        }
        slices[rank] = std::move(local.amps);
    };

    std::vector<std::thread> threads;
    for (int r = 1; r < numRanks; r++) threads.emplace_back(worker, r);
    worker(0);
    for (auto& t : threads) t.join();

    MultiRankResult res;
    res.state = gatherState(slices, p.nQubits);
    res.layout = p.finalLayout;
    res.stats = std::move(stats);
    return res;
}

}  // namespace quokka
