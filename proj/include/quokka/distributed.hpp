#pragma once

#include <cstddef>
#include <vector>

#include "quokka/engine.hpp"

namespace quokka {

struct RankStats {
    std::size_t bytesSent = 0;       // cross-rank traffic, self-copies excluded
    std::size_t bytesReceived = 0;
    std::size_t peakBufferBytes = 0; // exchange buffer high-water mark
    std::size_t rounds = 0;          // buffer-limited exchange rounds
    std::vector<std::pair<std::size_t, std::size_t>> perRound;  // (sent, received)
};

struct MultiRankResult {
    StateVector state;   // gathered, physical order
    QubitLayout layout;
    std::vector<RankStats> stats;  // one per rank
};

// Rank r owns global indices [r * 2^(N-R), (r+1) * 2^(N-R)).
Index rankSliceBase(int rank, const Config& cfg);

// Concatenate per-rank slices back into one vector (rank id order).
StateVector gatherState(const std::vector<std::vector<Amp>>& slices, int nQubits);

// Run the program on 2^R worker threads, one per rank. Gate blocks and
// in-memory swaps are rank-local; CrossRank ops run the buffered all-to-all
// exchange (send and receive volumes are symmetric and the per-rank buffer
// never exceeds 2^B amplitudes).
MultiRankResult spawnRanks(const Program& p, const Config& cfg, Index initial = 0);

// The collective exchange for one CrossRank op, applied to all slices.
// Exposed for tests; spawnRanks uses the same implementation from its
// workers. Pure permutation: equals bitswap(op.pairs) on global indices.
void xrsSwap(std::vector<std::vector<Amp>>& slices, const SwapOp& op, const Config& cfg,
             std::vector<RankStats>* stats = nullptr);

}  // namespace quokka
