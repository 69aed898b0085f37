#pragma once

// Shared helpers for the test binaries.

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "quokka/distributed.hpp"
#include "quokka/engine.hpp"
#include "quokka/optimizer.hpp"
#include "quokka/tools.hpp"

namespace qtest {

// 10-qubit QAOA-shaped benchmark with every RZZ angle equal to its gate id:
// small enough to oracle-check, wide enough to force one cross-rank
// transition when run with two rank qubits and four-qubit chunks.
inline const char* kShowcaseCircuit =
    "H 0 0\n"
    "H 1 1\n"
    "RZZ 2 4 2 2\n"
    "RZZ 5 7 3 3\n"
    "H 8 4\n"
    "H 9 5\n"
    "H 3 6\n"
    "H 6 7\n"
    "RZZ 0 2 8 8\n"
    "RZZ 4 7 9 9\n"
    "H 9 10\n"
    "RZZ 1 8 11 11\n"
    "RZZ 3 6 12 12\n"
    "H 5 13\n";

inline quokka::Circuit parseText(const std::string& text, int nQubits = -1) {
    std::istringstream in(text);
    return quokka::parseCircuit(in, nQubits);
}

inline quokka::Config cfgOf(int n, int r, int c, int f = -1) {
    quokka::Config cfg;
    cfg.totalQubits = n;
    cfg.rankQubits = r;
    cfg.chunkQubits = c;
    cfg.fusionQubits = f;
    cfg.finalize();
    return cfg;
}

// Text form of one swap op, matching the program serializer's field order.
inline std::string swapLine(const quokka::SwapOp& op) {
    std::string s = op.kind == quokka::SwapOp::CrossRank ? "CSQS" : "SQS";
    s += ' ';
    s += std::to_string(op.pairs.size());
    for (const auto& pr : op.pairs) s += ' ' + std::to_string(pr.first);
    for (const auto& pr : op.pairs) s += ' ' + std::to_string(pr.second);
    return s;
}

inline std::vector<std::string> swapLines(const quokka::Program& p) {
    std::vector<std::string> out;
    for (const auto& it : p.items)
        if (it.type == quokka::ProgramItem::Swap) out.push_back(swapLine(it.swap));
    return out;
}

// Gate ids per block, fused gates expanded to their constituent ids.
inline std::vector<std::vector<long>> blockIdSets(const quokka::Program& p) {
    std::vector<std::vector<long>> out;
    for (const auto& it : p.items) {
        if (it.type != quokka::ProgramItem::Block) continue;
        std::vector<long> ids;
        for (const quokka::Gate& g : it.block.gates) {
            if (g.constituents.empty())
                ids.push_back(g.id);
            else
                for (const quokka::Gate& c : g.constituents) ids.push_back(c.id);
        }
        std::sort(ids.begin(), ids.end());
        out.push_back(std::move(ids));
    }
    return out;
}

// Run the program (multi-rank when the config says so), undo the final
// layout, and compare against the oracle run of the raw circuit.
inline double programFidelity(const quokka::Circuit& raw, const quokka::Program& p,
                              const quokka::Config& cfg, quokka::Index initial = 0,
                              double* normOut = nullptr) {
    quokka::StateVector got;
    quokka::QubitLayout layout;
    if (cfg.rankQubits == 0) {
        quokka::SimResult r = quokka::simulateProgram(p, cfg, initial);
        got = std::move(r.state);
        layout = r.layout;
    } else {
        quokka::MultiRankResult r = quokka::spawnRanks(p, cfg, initial);
        got = std::move(r.state);
        layout = r.layout;
    }
    if (normOut) *normOut = got.norm();
    quokka::StateVector logical = quokka::layoutApply(got, layout);
    quokka::StateVector want = quokka::oracleSimulate(raw, initial);
    return quokka::fidelity(logical, want);
}

}  // namespace qtest
