#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "fixtures.hpp"
#include "quokka/common.hpp"
#include "quokka/optimizer.hpp"
#include "quokka/tools.hpp"

using namespace quokka;
using qtest::cfgOf;
using qtest::parseText;

namespace {

std::map<GateKind, int> kindHistogram(const Circuit& c) {
    std::map<GateKind, int> h;
    for (const Gate& g : c.gates) h[g.kind]++;
    return h;
}

bool idsAreSequential(const Circuit& c) {
    std::vector<long> ids;
    for (const Gate& g : c.gates) ids.push_back(g.id);
    std::sort(ids.begin(), ids.end());
    for (size_t i = 0; i < ids.size(); i++)
        if (ids[i] != long(i)) return false;
    return true;
}

}  // namespace

TEST_CASE("transform generator emits n(n+1)/2 gates") {
    for (int n : {1, 2, 3, 5, 8, 16}) {
        Circuit c = genQft(n);
        CAPTURE(n);
        CHECK(c.nQubits == n);
        CHECK(c.gates.size() == size_t(n) * (n + 1) / 2);
        CHECK(idsAreSequential(c));
    }
    CHECK(genQft(31).gates.size() == 496);

    Circuit q3 = genQft(3);
    auto h = kindHistogram(q3);
    CHECK(h[GateKind::H] == 3);
    CHECK(h[GateKind::CP] == 3);
    // Controlled-phase angles are pi/2^k.
    std::vector<double> angles;
    for (const Gate& g : q3.gates)
        if (g.kind == GateKind::CP) angles.push_back(g.params.at(0));
    std::sort(angles.begin(), angles.end());
    const double pi = 3.14159265358979323846;
    REQUIRE(angles.size() == 3);
    CHECK(angles[0] == doctest::Approx(pi / 4).epsilon(1e-15));
    CHECK(angles[1] == doctest::Approx(pi / 2).epsilon(1e-15));
    CHECK(angles[2] == doctest::Approx(pi / 2).epsilon(1e-15));
}

TEST_CASE("transform of the zero state is the uniform superposition") {
    for (int n : {2, 3, 5}) {
        StateVector sv = oracleSimulate(genQft(n));
        double want = std::pow(2.0, -n / 2.0);
        CAPTURE(n);
        for (const Amp& a : sv.amps) {
            CHECK(std::abs(a.real() - want) < 1e-12);
            CHECK(std::abs(a.imag()) < 1e-12);
        }
    }
}

TEST_CASE("layered ansatz generator counts and determinism") {
    // n + p * (n(n-1)/2 + n) gates.
    CHECK(genQaoa(31, 5, 1).gates.size() == 2511);
    Circuit c = genQaoa(4, 2, 9);
    CHECK(c.nQubits == 4);
    CHECK(c.gates.size() == 4 + 2 * (6 + 4));
    auto h = kindHistogram(c);
    CHECK(h[GateKind::H] == 4);
    CHECK(h[GateKind::RZZ] == 12);
    CHECK(h[GateKind::RX] == 8);
    CHECK(idsAreSequential(c));

    CHECK(serializeCircuit(genQaoa(4, 2, 9)) == serializeCircuit(c));
    CHECK(serializeCircuit(genQaoa(4, 2, 10)) != serializeCircuit(c));
}

TEST_CASE("hidden-string generator emits 2n + popcount gates and finds the string") {
    CHECK(genBvAllOnes(31).gates.size() == 92);
    CHECK(genBv(5, 0b101).gates.size() == 12);
    CHECK(genBv(5, 0).gates.size() == 10);
    CHECK_THROWS_AS(genBv(1, 0), ConfigError);

    // The data register measures the hidden string with certainty.
    for (std::uint64_t secret : {0b101ull, 0b0110ull, 0b1111ull}) {
        Circuit c = genBv(5, secret);
        auto h = kindHistogram(c);
        CHECK(h[GateKind::CX] == popcount64(secret));
        for (const Gate& g : c.gates)
            if (g.kind == GateKind::CX) CHECK(g.targets == std::vector<int>{4});

        StateVector sv = oracleSimulate(c);
        double mass = 0;
        for (Index i = 0; i < sv.amps.size(); i++)
            if ((i & 0xF) == secret) mass += std::norm(sv.amps[i]);
        CAPTURE(secret);
        CHECK(std::abs(mass - 1.0) < 1e-9);
    }

    // Bits beyond the data register are masked off.
    CHECK(serializeCircuit(genBv(5, 0b10101)) == serializeCircuit(genBv(5, 0b0101)));
}

TEST_CASE("gate benchmark generator covers one gate per qubit or pair") {
    Circuit h = genGateBench(GateKind::H, 6);
    CHECK(h.gates.size() == 6);
    for (const Gate& g : h.gates) CHECK(g.kind == GateKind::H);

    Circuit zz = genGateBench(GateKind::RZZ, 6);
    CHECK(zz.gates.size() == 5);
    for (size_t i = 0; i < zz.gates.size(); i++)
        CHECK(zz.gates[i].targets == std::vector<int>{int(i), int(i) + 1});

    Circuit cx = genGateBench(GateKind::CX, 4);
    CHECK(cx.gates.size() == 3);
    for (const Gate& g : cx.gates) CHECK(g.controls.size() == 1);
}

TEST_CASE("random circuit generator is seeded and well formed") {
    Circuit c = genRandom(7, 25, 4);
    CHECK(c.nQubits == 7);
    CHECK(c.gates.size() == 25);
    CHECK(idsAreSequential(c));
    for (const Gate& g : c.gates) {
        for (int q : g.qubits()) {
            CHECK(q >= 0);
            CHECK(q < 7);
        }
        CHECK(g.kind != GateKind::FusedDiag);
        CHECK(g.kind != GateKind::FusedDense);
    }
    CHECK(serializeCircuit(genRandom(7, 25, 4)) == serializeCircuit(c));
    CHECK(serializeCircuit(genRandom(7, 25, 5)) != serializeCircuit(c));
}

TEST_CASE("the oracle is limited to twenty qubits") {
    Circuit c;
    c.nQubits = 21;
    c.gates = {makeH(20, 0)};
    CHECK_THROWS_AS(oracleSimulate(c), SimulationError);
}

TEST_CASE("layoutApply sends physical bits back to their logical slots") {
    StateVector sv = initState(3, 0b001);
    QubitLayout l = QubitLayout::identity(3);
    l.swapPositions(0, 2);  // physical 0 now holds logical 2
    StateVector out = layoutApply(sv, l);
    REQUIRE(out.amps.size() == 8);
    for (Index i = 0; i < 8; i++) CHECK(out.amps[i] == (i == 0b100 ? Amp(1, 0) : Amp(0, 0)));

    StateVector idsv = initState(3, 5);
    CHECK(layoutApply(idsv, QubitLayout::identity(3)).amps == idsv.amps);
}

TEST_CASE("fidelity is a phase-insensitive overlap") {
    StateVector a = initState(2, 0);
    StateVector b = initState(2, 1);
    CHECK(fidelity(a, b) == 0.0);
    CHECK(fidelity(a, a) == 1.0);

    StateVector c = a;
    for (Amp& x : c.amps) x *= std::polar(1.0, 0.83);
    CHECK(fidelity(a, c) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("validateOrder accepts faithful programs") {
    Circuit c = parseText(qtest::kShowcaseCircuit);
    Config cfg = cfgOf(10, 2, 4);
    Program p = aioOptimize(c, cfg);
    OrderReport rep = validateOrder(c, p);
    CAPTURE(rep.message);
    CHECK(rep.ok);
    CHECK(rep.message.empty());
}

TEST_CASE("validateOrder flags reordered dependent gates") {
    Circuit c = parseText(qtest::kShowcaseCircuit);
    Config cfg = cfgOf(10, 2, 4);
    cfg.fusionEnabled = false;
    cfg.diagonalFusionEnabled = false;
    Program p = aioOptimize(c, cfg);

    // Swap two gates that share a qubit inside one block.
    bool swapped = false;
    for (auto& it : p.items) {
        if (it.type != ProgramItem::Block || swapped) continue;
        auto& gs = it.block.gates;
        for (size_t i = 0; i + 1 < gs.size() && !swapped; i++)
            for (size_t j = i + 1; j < gs.size() && !swapped; j++)
                if (gs[i].depMask() & gs[j].depMask()) {
                    std::swap(gs[i], gs[j]);
                    swapped = true;
                }
    }
    REQUIRE(swapped);
    OrderReport rep = validateOrder(c, p);
    CHECK_FALSE(rep.ok);
    CHECK_FALSE(rep.message.empty());
    CHECK(rep.qubit >= 0);
    CHECK(rep.expectedId != rep.gotId);
}

TEST_CASE("validateOrder flags dropped, duplicated, and tampered gates") {
    Circuit c = parseText(qtest::kShowcaseCircuit);
    Config cfg = cfgOf(10, 2, 4);
    cfg.fusionEnabled = false;
    cfg.diagonalFusionEnabled = false;
    Program base = aioOptimize(c, cfg);
    REQUIRE(validateOrder(c, base).ok);

    auto lastBlock = [](Program& p) -> GateBlock& {
        for (auto it = p.items.rbegin(); it != p.items.rend(); ++it)
            if (it->type == ProgramItem::Block) return it->block;
        throw std::logic_error("no block");
    };

    Program dropped = base;
    lastBlock(dropped).gates.pop_back();
    CHECK_FALSE(validateOrder(c, dropped).ok);

    Program duped = base;
    lastBlock(duped).gates.push_back(lastBlock(duped).gates.back());
    CHECK_FALSE(validateOrder(c, duped).ok);

    Program wrongKind = base;
    for (auto& it : wrongKind.items)
        if (it.type == ProgramItem::Block)
            for (Gate& g : it.block.gates)
                if (g.kind == GateKind::H) {
                    g.kind = GateKind::X;
                    goto tampered;
                }
tampered:
    CHECK_FALSE(validateOrder(c, wrongKind).ok);

    Program wrongAngle = base;
    for (auto& it : wrongAngle.items)
        if (it.type == ProgramItem::Block)
            for (Gate& g : it.block.gates)
                if (!g.params.empty()) {
                    g.params[0] += 0.5;
                    goto bent;
                }
bent:
    CHECK_FALSE(validateOrder(c, wrongAngle).ok);
}

TEST_CASE("validateOrder needs constituents to expand fused gates") {
    Circuit c = parseText(qtest::kShowcaseCircuit);
    Config cfg = cfgOf(10, 2, 4);
    Program p = aioOptimize(c, cfg);

    bool cleared = false;
    for (auto& it : p.items)
        if (it.type == ProgramItem::Block)
            for (Gate& g : it.block.gates)
                if (g.kind == GateKind::FusedDiag && !cleared) {
                    g.constituents.clear();
                    cleared = true;
                }
    REQUIRE(cleared);
    OrderReport rep = validateOrder(c, p);
    CHECK_FALSE(rep.ok);
    CHECK_FALSE(rep.message.empty());
}
