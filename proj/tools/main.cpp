#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quokka/distributed.hpp"
#include "quokka/engine.hpp"
#include "quokka/kernels.hpp"
#include "quokka/optimizer.hpp"
#include "quokka/tools.hpp"

namespace {

using namespace quokka;

double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

void writeText(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << text;
}

GateKind kindFromName(const std::string& name) {
    static const std::pair<const char*, GateKind> table[] = {
        {"H", GateKind::H},   {"U", GateKind::U},   {"X", GateKind::X},
        {"CX", GateKind::CX}, {"CP", GateKind::CP}, {"SWAP", GateKind::SWAP},
        {"RX", GateKind::RX}, {"RY", GateKind::RY}, {"RZ", GateKind::RZ},
        {"RZZ", GateKind::RZZ},
    };
    for (const auto& e : table)
        if (name == e.first) return e.second;
    throw ConfigError("unknown gate kind '" + name + "'");
}

struct OptimizeArgs {
    std::string input, output, configFile;
    std::vector<std::string> positional;
};

int runOptimize(const OptimizeArgs& a) {
    std::string input = a.input;
    Config cfg;
    if (!a.configFile.empty()) {
        if (!a.positional.empty())
            throw ConfigError("--config and the positional parameter form are exclusive");
        cfg = parseConfigFile(a.configFile);
    } else {
        // Compatibility form: file chunk in-rank total ims xrs fusion_qbit fusion
        std::vector<std::string> nums = a.positional;
        if (input.empty() && !nums.empty()) {
            input = nums.front();
            nums.erase(nums.begin());
        }
        if (nums.size() != 7)
            throw ConfigError(
                "expected: optimize <circuit> <chunk_qbit> <inrank_qbit> <total_qbit> "
                "<ims> <xrs> <fusion_qbit> <fusion>");
        int vals[7];
        for (int i = 0; i < 7; i++) {
            try {
                std::size_t pos = 0;
                vals[i] = std::stoi(nums[i], &pos);
                if (pos != nums[i].size()) throw std::invalid_argument(nums[i]);
            } catch (...) {
                throw ConfigError("bad numeric parameter '" + nums[i] + "'");
            }
        }
        cfg.chunkQubits = vals[0];
        cfg.totalQubits = vals[2];
        cfg.rankQubits = vals[2] - vals[1];
        cfg.imsEnabled = vals[3] != 0;
        cfg.xrsEnabled = vals[4] != 0;
        cfg.fusionQubits = vals[5];
        cfg.fusionEnabled = vals[6] != 0;
        cfg.diagonalFusionEnabled = vals[6] != 0;
        cfg.finalize();
    }
    if (input.empty()) throw ConfigError("no circuit file given");

    Circuit c = parseCircuitFile(input, cfg.totalQubits);
    auto t0 = std::chrono::steady_clock::now();
    Program p = aioOptimize(c, cfg);
    auto t1 = std::chrono::steady_clock::now();
    writeText(a.output, serializeProgram(p));
    std::cerr << "gates: " << c.gates.size() << " blocks: " << p.blockCount()
              << " in-memory swaps: " << p.swapCount(SwapOp::InMemory)
              << " cross-rank swaps: " << p.swapCount(SwapOp::CrossRank)
              << " wall_time_s: " << seconds(t0, t1) << "\n";
    return 0;
}

struct SimulateArgs {
    std::string configFile, circuitFile;
    bool raw = false;
    bool dumpState = false;
    std::uint64_t initial = 0;
    int threads = 0;
};

int runSimulate(const SimulateArgs& a) {
    Config cfg = parseConfigFile(a.configFile);
    StateVector state;
    QubitLayout layout = QubitLayout::identity(cfg.totalQubits);
    std::size_t gates = 0;
    double wall = 0.0;

    if (a.raw) {
        Circuit c = parseCircuitFile(a.circuitFile, cfg.totalQubits);
        gates = c.gates.size();
        auto t0 = std::chrono::steady_clock::now();
        state = simulateGateByGate(c, a.initial, a.threads);
        wall = seconds(t0, std::chrono::steady_clock::now());
    } else {
        Program p = parseProgramFile(a.circuitFile, cfg);
        gates = p.gateCount();
        auto t0 = std::chrono::steady_clock::now();
        if (cfg.rankQubits > 0) {
            MultiRankResult r = spawnRanks(p, cfg, a.initial);
            wall = seconds(t0, std::chrono::steady_clock::now());
            state = std::move(r.state);
            layout = r.layout;
            std::size_t sent = 0, peak = 0;
            for (const RankStats& st : r.stats) {
                sent += st.bytesSent;
                peak = std::max(peak, st.peakBufferBytes);
            }
            std::cerr << "ranks: " << (1 << cfg.rankQubits) << " bytes_sent: " << sent
                      << " peak_buffer_bytes: " << peak << "\n";
        } else {
            SimResult r = simulateProgram(p, cfg, a.initial, a.threads);
            wall = seconds(t0, std::chrono::steady_clock::now());
            state = std::move(r.state);
            layout = r.layout;
        }
    }

    std::cout << "qubits: " << cfg.totalQubits << "\n";
    std::cout << "gates: " << gates << "\n";
    std::cout << "wall_time_s: " << fmt17(wall) << "\n";
    std::cout << "norm: " << fmt17(state.norm()) << "\n";
    if (a.dumpState) {
        if (cfg.totalQubits > 20)
            throw ConfigError("state dumps are limited to 20 qubits");
        StateVector logical = layoutApply(state, layout);
        for (Index i = 0; i < Index(logical.amps.size()); i++)
            std::cout << i << " " << fmt17(logical.amps[i].real()) << " "
                      << fmt17(logical.amps[i].imag()) << "\n";
    }
    return 0;
}

struct ValidateArgs {
    std::string rawFile, programFile, configFile;
};

int runValidate(const ValidateArgs& a) {
    Config cfg;
    Circuit raw;
    Program p;
    if (!a.configFile.empty()) {
        cfg = parseConfigFile(a.configFile);
        raw = parseCircuitFile(a.rawFile, cfg.totalQubits);
        p = parseProgramFile(a.programFile, cfg);
    } else {
        raw = parseCircuitFile(a.rawFile);
        cfg.totalQubits = raw.nQubits;
        cfg.rankQubits = 0;
        cfg.chunkQubits = raw.nQubits;
        cfg.cacheLineQubits = 0;
        cfg.fusionQubits = raw.nQubits;
        cfg.bufferQubits = raw.nQubits;
        p = parseProgramFile(a.programFile, cfg, /*lenient=*/true);
    }
    OrderReport rep = validateOrder(raw, p);
    if (!rep.ok) {
        std::cerr << "validation failed: " << rep.message << "\n";
        return 4;
    }
    std::cout << "Passed all circuit order validations\n";
    return 0;
}

struct GenArgs {
    std::string output;
    int n = 0;
    int layers = 1;
    int gates = 100;
    std::uint64_t seed = 12345;
    std::uint64_t secret = ~std::uint64_t(0);
    bool secretSet = false;
    std::string kind = "H";
    std::string which;
};

int runGen(const GenArgs& a) {
    Circuit c;
    if (a.which == "qft") c = genQft(a.n);
    else if (a.which == "qaoa") c = genQaoa(a.n, a.layers, a.seed);
    else if (a.which == "bv") c = a.secretSet ? genBv(a.n, a.secret) : genBvAllOnes(a.n);
    else if (a.which == "gate") c = genGateBench(kindFromName(a.kind), a.n);
    else if (a.which == "random") c = genRandom(a.n, a.gates, a.seed);
    else throw ConfigError("unknown generator '" + a.which + "'");
    writeText(a.output, serializeCircuit(c));
    std::cerr << "qubits: " << c.nQubits << " gates: " << c.gates.size() << "\n";
    return 0;
}

struct BenchArgs {
    int n = 24;
    int gates = 200;
    int repeats = 10;
    int threads = 0;
    std::uint64_t seed = 12345;
    std::string engine = "blockwise";
    std::string circuit = "random";
    bool compare = false;
};

double medianOf(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int runBench(const BenchArgs& a) {
    Circuit c;
    if (a.circuit == "random") c = genRandom(a.n, a.gates, a.seed);
    else if (a.circuit == "qft") c = genQft(a.n);
    else if (a.circuit == "qaoa") c = genQaoa(a.n, 1, a.seed);
    else throw ConfigError("unknown bench circuit '" + a.circuit + "'");

    Config cfg;
    cfg.totalQubits = a.n;
    cfg.rankQubits = 0;
    // The blockwise engine is timed as a pure cache-blocking run. Fusion trades
    // full-state passes for extra multiplies per amplitude; that pays off only
    // when passes are memory-bound, which chunk-resident execution is not.
    cfg.fusionEnabled = false;
    cfg.diagonalFusionEnabled = false;
    cfg.finalize();

    std::vector<std::string> engines;
    if (a.compare) engines = {"blockwise", "gate_by_gate"};
    else engines = {a.engine};

    std::cout << "name,n_qubits,ranks,gates,engine,wall_time_s,time_per_gate_s\n";
    double blockTime = 0.0, rawTime = 0.0;
    for (const std::string& eng : engines) {
        std::vector<double> times;
        if (eng == "blockwise") {
            Program p = aioOptimize(c, cfg);
            for (int r = 0; r < a.repeats; r++) {
                auto t0 = std::chrono::steady_clock::now();
                SimResult res = simulateProgram(p, cfg, 0, a.threads);
                times.push_back(seconds(t0, std::chrono::steady_clock::now()));
            }
        } else if (eng == "gate_by_gate") {
            for (int r = 0; r < a.repeats; r++) {
                auto t0 = std::chrono::steady_clock::now();
                StateVector res = simulateGateByGate(c, 0, a.threads);
                times.push_back(seconds(t0, std::chrono::steady_clock::now()));
            }
        } else {
            throw ConfigError("unknown engine '" + eng + "' (blockwise, gate_by_gate)");
        }
        double med = medianOf(times);
        if (eng == "blockwise") blockTime = med;
        else rawTime = med;
        std::cout << a.circuit << "," << a.n << ",1," << c.gates.size() << "," << eng << ","
                  << fmt17(med) << "," << fmt17(med / double(c.gates.size())) << "\n";
    }
    if (a.compare && blockTime > 0.0)
        std::cerr << "speedup: " << fmt17(rawTime / blockTime) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cache-aware state-vector quantum circuit simulator"};
    app.require_subcommand(1);

    OptimizeArgs optA;
    CLI::App* opt = app.add_subcommand("optimize", "partition a circuit into blocks and swaps");
    opt->add_option("-i,--input", optA.input, "raw circuit file");
    opt->add_option("-o,--output", optA.output, "program output file (default stdout)");
    opt->add_option("--config", optA.configFile, "INI config; replaces the parameter list");
    opt->add_option("params", optA.positional,
                    "circuit chunk_qbit inrank_qbit total_qbit ims xrs fusion_qbit fusion");

    SimulateArgs simA;
    CLI::App* sim = app.add_subcommand("simulate", "run an optimized program or a raw circuit");
    sim->add_option("-i,--config", simA.configFile, "INI config file")->required();
    sim->add_option("-c,--circuit", simA.circuitFile, "program file (or raw circuit with --raw)")
        ->required();
    sim->add_flag("--raw", simA.raw, "treat the input as a raw circuit, gate by gate");
    sim->add_flag("--dump-state", simA.dumpState, "print all amplitudes (limit 20 qubits)");
    sim->add_option("--initial", simA.initial, "initial basis state index");
    sim->add_option("--threads", simA.threads, "worker threads (default QUOKKA_THREADS or cores)");

    ValidateArgs valA;
    CLI::App* val = app.add_subcommand("validate", "check a program against its raw circuit");
    val->add_option("circuit", valA.rawFile, "raw circuit file")->required();
    val->add_option("program", valA.programFile, "optimized program file")->required();
    val->add_option("-i,--config", valA.configFile, "INI config (enables strict bounds)");

    GenArgs genA;
    CLI::App* gen = app.add_subcommand("gen", "write a benchmark circuit");
    gen->add_option("generator", genA.which, "qft | qaoa | bv | gate | random")->required();
    gen->add_option("-n,--qubits", genA.n, "qubit count")->required();
    gen->add_option("-o,--output", genA.output, "output file (default stdout)");
    gen->add_option("-l,--layers", genA.layers, "qaoa layers");
    gen->add_option("-g,--gates", genA.gates, "random gate count");
    gen->add_option("--seed", genA.seed, "rng seed");
    gen->add_option("--secret", genA.secret, "hidden bit string for bv")
        ->each([&genA](const std::string&) { genA.secretSet = true; });
    gen->add_option("--kind", genA.kind, "gate kind for the gate generator");

    BenchArgs benA;
    CLI::App* ben = app.add_subcommand("bench", "time the engines, CSV on stdout");
    ben->add_option("-n,--qubits", benA.n, "qubit count");
    ben->add_option("-g,--gates", benA.gates, "gate count for random circuits");
    ben->add_option("--seed", benA.seed, "rng seed");
    ben->add_option("--engine", benA.engine, "blockwise | gate_by_gate");
    ben->add_flag("--compare", benA.compare, "run both engines");
    ben->add_option("--repeats", benA.repeats, "timing repeats (median reported)");
    ben->add_option("--circuit", benA.circuit, "random | qft");
    ben->add_option("--threads", benA.threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const quokka::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const quokka::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const quokka::SimulationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    try {
        if (opt->parsed()) return runOptimize(optA);
        if (sim->parsed()) return runSimulate(simA);
        if (val->parsed()) return runValidate(valA);
        if (gen->parsed()) return runGen(genA);
        if (ben->parsed()) return runBench(benA);
    } catch (const quokka::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const quokka::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const quokka::SimulationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
