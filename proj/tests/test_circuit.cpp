#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "quokka/circuit.hpp"
#include "quokka/common.hpp"

using namespace quokka;
using qtest::cfgOf;
using qtest::parseText;

namespace {

Program parseProgText(const std::string& text, const Config& cfg, bool lenient = false) {
    std::istringstream in(text);
    return parseProgram(in, cfg, lenient);
}

bool sameGate(const Gate& a, const Gate& b) {
    return a.kind == b.kind && a.targets == b.targets && a.controls == b.controls &&
           a.params == b.params && a.id == b.id && a.payload == b.payload;
}

}  // namespace

TEST_CASE("parseGateLine splits fields as kind, qubits, id, params") {
    Gate g = parseGateLine("RZZ 2 4 2 0.5", 1);
    CHECK(g.kind == GateKind::RZZ);
    CHECK(g.targets == std::vector<int>{2, 4});
    CHECK(g.controls.empty());
    CHECK(g.id == 2);
    CHECK(g.params == std::vector<double>{0.5});

    Gate cx = parseGateLine("CX 3 1 7", 1);
    CHECK(cx.kind == GateKind::CX);
    CHECK(cx.controls == std::vector<int>{3});
    CHECK(cx.targets == std::vector<int>{1});
    CHECK(cx.id == 7);

    Gate cp = parseGateLine("CP 0 1 4 0.25", 1);
    CHECK(cp.controls == std::vector<int>{0});
    CHECK(cp.targets == std::vector<int>{1});
    CHECK(cp.params == std::vector<double>{0.25});

    Gate u = parseGateLine("U 6 12 0.1 0.2 0.3", 1);
    CHECK(u.kind == GateKind::U);
    CHECK(u.targets == std::vector<int>{6});
    CHECK(u.id == 12);
    CHECK(u.params == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("missing trailing angles default to zero") {
    Gate rz = parseGateLine("RZ 0 3", 1);
    CHECK(rz.params == std::vector<double>{0.0});
    Gate u = parseGateLine("U 0 5 1.5", 1);
    CHECK(u.params == std::vector<double>{1.5, 0.0, 0.0});
}

TEST_CASE("parseGateLine rejects malformed lines") {
    CHECK_THROWS_AS(parseGateLine("", 1), ParseError);
    CHECK_THROWS_AS(parseGateLine("FOO 1 2", 1), ParseError);
    CHECK_THROWS_AS(parseGateLine("H 0", 1), ParseError);           // no id
    CHECK_THROWS_AS(parseGateLine("H 0 0 1", 1), ParseError);       // extra field
    CHECK_THROWS_AS(parseGateLine("RZZ 2 2 1 0.5", 1), ParseError); // duplicate qubit
    CHECK_THROWS_AS(parseGateLine("H -1 0", 1), ParseError);
    CHECK_THROWS_AS(parseGateLine("H x 0", 1), ParseError);
    CHECK_THROWS_AS(parseGateLine("RZ 0 1 nope", 1), ParseError);
}

TEST_CASE("parseCircuit skips comments and infers the qubit count") {
    Circuit c = parseText("# comment\n\nH 0 0\n// another\nRZZ 3 5 1 0.5  # trailing\n");
    CHECK(c.nQubits == 6);
    REQUIRE(c.gates.size() == 2);
    CHECK(c.gates[0].kind == GateKind::H);
    CHECK(c.gates[1].targets == std::vector<int>{3, 5});
}

TEST_CASE("parseCircuit validates ids and qubit bounds") {
    CHECK_THROWS_AS(parseText("H 0 0\nH 1 0\n"), ParseError);   // duplicate id
    CHECK_THROWS_AS(parseText("H 0 -2\n"), ParseError);         // negative id
    CHECK_THROWS_AS(parseText("H 5 0\n", 4), ParseError);       // out of declared range
    CHECK_NOTHROW(parseText("H 3 0\n", 4));
}

TEST_CASE("circuit text round-trips exactly") {
    Circuit c = parseText(qtest::kShowcaseCircuit);
    std::string s1 = serializeCircuit(c);
    Circuit c2 = parseText(s1);
    REQUIRE(c2.gates.size() == c.gates.size());
    for (size_t i = 0; i < c.gates.size(); i++) CHECK(sameGate(c.gates[i], c2.gates[i]));
    CHECK(serializeCircuit(c2) == s1);

    Circuit f = parseText("U 2 0 0.12345678901234567 2.5 -0.75\nCP 1 0 1 3.0000000000000004\n");
    CHECK(serializeCircuit(parseText(serializeCircuit(f))) == serializeCircuit(f));
}

TEST_CASE("fused gate lines carry payload and constituents through text") {
    Gate fd;
    fd.kind = GateKind::FusedDiag;
    fd.targets = {0, 2};
    fd.id = 5;
    fd.payload = {Amp(0.6, 0.8), Amp(1, 0), Amp(0, 1), Amp(-0.6, -0.8)};
    fd.constituents = {makeRZZ(0, 2, 0.5, 5), makeRZ(0, 1.25, 9)};

    std::string line = serializeGate(fd);
    CHECK(line.substr(0, 7) == "D2 0 2 ");
    Gate back = parseGateLine(line, 1);
    CHECK(back.kind == GateKind::FusedDiag);
    CHECK(back.targets == fd.targets);
    CHECK(back.id == 5);  // id is the smallest constituent id
    REQUIRE(back.payload.size() == 4);
    for (int i = 0; i < 4; i++) CHECK(back.payload[i] == fd.payload[i]);
    REQUIRE(back.constituents.size() == 2);
    CHECK(sameGate(back.constituents[0], fd.constituents[0]));
    CHECK(sameGate(back.constituents[1], fd.constituents[1]));

    Gate fu;
    fu.kind = GateKind::FusedDense;
    fu.targets = {1, 0};
    fu.id = 3;
    fu.payload = gateMatrix(makeCX(1, 0, 3));
    fu.constituents = {makeCX(1, 0, 3), makeH(0, 7)};
    Gate fub = parseGateLine(serializeGate(fu), 1);
    CHECK(fub.kind == GateKind::FusedDense);
    CHECK(fub.targets == fu.targets);
    REQUIRE(fub.payload.size() == 16);
    for (int i = 0; i < 16; i++) CHECK(fub.payload[i] == fu.payload[i]);
    REQUIRE(fub.constituents.size() == 2);
    CHECK(sameGate(fub.constituents[1], fu.constituents[1]));

    // A four-qubit diagonal line is the token D4, four targets, then 16
    // complex entries = 32 numbers before the constituent section.
    Gate d4;
    d4.kind = GateKind::FusedDiag;
    d4.targets = {0, 1, 2, 3};
    d4.id = 0;
    for (int i = 0; i < 16; i++) d4.payload.push_back(std::polar(1.0, 0.1 * i));
    std::istringstream toks(serializeGate(d4));
    std::vector<std::string> fields;
    std::string t;
    while (toks >> t) fields.push_back(t);
    REQUIRE(fields.size() >= 5 + 32);
    CHECK(fields[0] == "D4");
    CHECK(fields[1] == "0");
    CHECK(fields[4] == "3");
    for (int i = 0; i < 32; i++) CHECK_NOTHROW(std::stod(fields[5 + i]));
}

TEST_CASE("program parser accepts wrapped and bare swap lines") {
    Config cfg = cfgOf(5, 1, 2);
    std::string bare =
        "2\nH 0 0\nH 1 1\n"
        "SQS 2 0 1 2 3\n"
        "CSQS 1 0 4\n"
        "1\nRZ 0 2 0.5\n";
    std::string wrapped =
        "2\nH 0 0\nH 1 1\n"
        "1\nSQS 2 0 1 2 3\n"
        "1\nCSQS 1 0 4\n"
        "1\nRZ 0 2 0.5\n";
    Program a = parseProgText(bare, cfg);
    Program b = parseProgText(wrapped, cfg);
    CHECK(serializeProgram(a) == serializeProgram(b));

    CHECK(a.blockCount() == 2);
    CHECK(a.swapCount(SwapOp::InMemory) == 1);
    CHECK(a.swapCount(SwapOp::CrossRank) == 1);
    CHECK(a.gateCount() == 3);

    // Replaying the swaps from identity: SQS (0,2),(1,3) then CSQS (0,4).
    CHECK(a.finalLayout.physToLog == std::vector<int>{4, 3, 0, 1, 2});

    // Serialize -> parse -> serialize is a fixpoint.
    std::string s = serializeProgram(a);
    CHECK(serializeProgram(parseProgText(s, cfg)) == s);
}

TEST_CASE("program parser rejects malformed records and swaps") {
    Config cfg = cfgOf(5, 1, 2);
    CHECK_THROWS_AS(parseProgText("H 0 0\n", cfg), ParseError);          // no record header
    CHECK_THROWS_AS(parseProgText("3\nH 0 0\n", cfg), ParseError);       // truncated record
    CHECK_THROWS_AS(parseProgText("0\n", cfg), ParseError);              // empty record
    CHECK_THROWS_AS(parseProgText("2\nH 0 0\nSQS 1 0 1\n", cfg), ParseError);  // swap in block

    CHECK_THROWS_AS(parseProgText("SQS 2 0 1 1 2\n", cfg), ParseError);  // positions overlap
    CHECK_THROWS_AS(parseProgText("SQS 2 1 0 2 3\n", cfg), ParseError);  // not ascending
    CHECK_THROWS_AS(parseProgText("SQS 2 0 1 2\n", cfg), ParseError);    // field count
    CHECK_THROWS_AS(parseProgText("SQS 0\n", cfg), ParseError);          // size < 1
    CHECK_THROWS_AS(parseProgText("SQS 1 0 9\n", cfg), ParseError);      // exceeds N
}

TEST_CASE("strict program bounds respect the qubit split, lenient relaxes them") {
    Config cfg = cfgOf(5, 1, 2);  // region 4, chunk 2
    // In-memory swaps must stay inside the rank region.
    CHECK_THROWS_AS(parseProgText("SQS 1 0 4\n", cfg), ParseError);
    CHECK_NOTHROW(parseProgText("SQS 1 0 4\n", cfg, true));
    // Cross-rank pairs go from an in-rank position to a rank bit.
    CHECK_NOTHROW(parseProgText("CSQS 1 3 4\n", cfg));
    CHECK_THROWS_AS(parseProgText("CSQS 1 4 0\n", cfg), ParseError);
    CHECK_THROWS_AS(parseProgText("CSQS 1 0 2\n", cfg), ParseError);
    // Block gates must fit in the chunk unless lenient.
    CHECK_THROWS_AS(parseProgText("1\nH 3 0\n", cfg), ParseError);
    CHECK_NOTHROW(parseProgText("1\nH 3 0\n", cfg, true));
    CHECK_THROWS_AS(parseProgText("1\nH 5 0\n", cfg, true), ParseError);
}

TEST_CASE("the two-rank benchmark listing parses to 4 blocks, 5 in-memory and 1 cross-rank swap") {
    const char* listing =
        "3\nH 0 0\nH 1 1\nH 3 6\n"
        "1\nSQS 3 0 1 2 5 6 7\n"
        "4\nRZZ 0 2 3 3\nH 1 7\nRZZ 3 1 12 12\nH 0 13\n"
        "1\nSQS 3 0 1 3 4 5 7\n"
        "3\nRZZ 3 0 2 2\nRZZ 1 3 8 8\nRZZ 0 2 9 9\n"
        "1\nSQS 1 5 6\n"
        "1\nCSQS 2 6 7 8 9\n"
        "1\nSQS 1 5 6\n"
        "1\nSQS 3 0 2 3 5 6 7\n"
        "4\nH 0 4\nH 3 5\nH 3 10\nRZZ 2 0 11 11\n";
    Config cfg = cfgOf(10, 2, 4);
    Program p = parseProgText(listing, cfg);
    CHECK(p.blockCount() == 4);
    CHECK(p.swapCount(SwapOp::InMemory) == 5);
    CHECK(p.swapCount(SwapOp::CrossRank) == 1);
    CHECK(p.gateCount() == 14);
    for (const auto& it : p.items)
        if (it.type == ProgramItem::Block)
            for (const Gate& g : it.block.gates)
                for (int q : g.qubits()) CHECK(q < 4);
    CHECK(serializeProgram(p) == listing);
}

TEST_CASE("config defaults and invariants") {
    std::istringstream in("[system]\ntotal_qbit = 12\n");
    Config cfg = parseConfig(in);
    CHECK(cfg.totalQubits == 12);
    CHECK(cfg.rankQubits == 0);
    CHECK(cfg.chunkQubits == 10);
    CHECK(cfg.fusionQubits == 5);
    CHECK(cfg.cacheLineQubits == 2);
    CHECK(cfg.bufferQubits == 12);
    CHECK(cfg.imsEnabled);
    CHECK(cfg.xrsEnabled);
    CHECK(cfg.fusionEnabled);
    CHECK(cfg.diagonalFusionEnabled);

    std::istringstream small("[system]\ntotal_qbit = 3\n");
    Config t = parseConfig(small);
    CHECK(t.chunkQubits == 3);   // clamped to the rank region
    CHECK(t.fusionQubits == 3);
    CHECK(t.cacheLineQubits == 2);
    CHECK(t.bufferQubits == 3);

    std::istringstream full(
        "[system]\n"
        "total_qbit = 30\n"
        "rank_qbit = 3\n"
        "buffer_qbit = 20\n"
        "chunk_qbit = 12\n"
        "fusion_qbit = 4\n"
        "cache_line_qbit = 3\n"
        "ims = 0\n"
        "xrs = 0\n"
        "fusion = 0\n"
        "diagonal_fusion = 0\n");
    Config f = parseConfig(full);
    CHECK(f.rankQubits == 3);
    CHECK(f.rankRegion() == 27);
    CHECK(f.bufferQubits == 20);
    CHECK(f.chunkQubits == 12);
    CHECK_FALSE(f.imsEnabled);
    CHECK_FALSE(f.xrsEnabled);
    CHECK_FALSE(f.fusionEnabled);
    CHECK_FALSE(f.diagonalFusionEnabled);
}

TEST_CASE("config errors") {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return parseConfig(in);
    };
    CHECK_THROWS_AS(parse("[system]\nrank_qbit = 1\n"), ConfigError);          // missing total
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 41\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 4\nrank_qbit = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 8\nchunk_qbit = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 8\nchunk_qbit = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 8\nfusion_qbit = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 8\ncache_line_qbit = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 8\nbuffer_qbit = 9\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = 8\nmystery = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit\n"), ConfigError);
    CHECK_THROWS_AS(parse("[system]\ntotal_qbit = soon\n"), ConfigError);

    Config byHand;
    byHand.totalQubits = 8;
    byHand.fusionQubits = 0;  // fusion on but no budget
    CHECK_THROWS_AS(byHand.finalize(), ConfigError);
}

TEST_CASE("config text round-trips") {
    Config cfg = cfgOf(16, 2, 6, 3);
    cfg.imsEnabled = false;
    std::string s = serializeConfig(cfg);
    std::istringstream in(s);
    Config back = parseConfig(in);
    CHECK(back.totalQubits == cfg.totalQubits);
    CHECK(back.rankQubits == cfg.rankQubits);
    CHECK(back.chunkQubits == cfg.chunkQubits);
    CHECK(back.fusionQubits == cfg.fusionQubits);
    CHECK(back.cacheLineQubits == cfg.cacheLineQubits);
    CHECK(back.bufferQubits == cfg.bufferQubits);
    CHECK(back.imsEnabled == cfg.imsEnabled);
    CHECK(back.xrsEnabled == cfg.xrsEnabled);
    CHECK(serializeConfig(back) == s);
}

TEST_CASE("QubitLayout tracks position swaps") {
    QubitLayout l = QubitLayout::identity(5);
    CHECK(l.isIdentity());
    CHECK(l.size() == 5);
    l.swapPositions(0, 3);
    CHECK_FALSE(l.isIdentity());
    CHECK(l.physToLog == std::vector<int>{3, 1, 2, 0, 4});
    CHECK(l.logToPhys == std::vector<int>{3, 1, 2, 0, 4});
    l.applyPairs({{0, 1}, {2, 4}});
    CHECK(l.physToLog == std::vector<int>{1, 3, 4, 0, 2});
    for (int p = 0; p < 5; p++) CHECK(l.logToPhys[l.physToLog[p]] == p);
    l.applyPairs({{0, 1}, {2, 4}});
    l.swapPositions(0, 3);
    CHECK(l.isIdentity());
}
