#include "quokka/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace quokka {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- QubitLayout

QubitLayout QubitLayout::identity(int n) {
    QubitLayout l;
    l.logToPhys.resize(n);
    l.physToLog.resize(n);
    for (int i = 0; i < n; i++) l.logToPhys[i] = l.physToLog[i] = i;
    return l;
}

bool QubitLayout::isIdentity() const {
    for (int i = 0; i < size(); i++)
        if (logToPhys[i] != i) return false;
    return true;
}

void QubitLayout::swapPositions(int a, int b) {
    int la = physToLog[a], lb = physToLog[b];
    std::swap(physToLog[a], physToLog[b]);
    logToPhys[la] = b;
    logToPhys[lb] = a;
}

void QubitLayout::applyPairs(const std::vector<std::pair<int, int>>& pairs) {
    for (auto& pr : pairs) swapPositions(pr.first, pr.second);
}

// ---------------------------------------------------------------- ProgramItem

ProgramItem ProgramItem::makeBlock(GateBlock b) {
    ProgramItem it;
    it.type = Block;
    it.block = std::move(b);
    return it;
}

ProgramItem ProgramItem::makeSwap(SwapOp s) {
    ProgramItem it;
    it.type = Swap;
    it.swap = std::move(s);
    return it;
}

size_t Program::blockCount() const {
    size_t n = 0;
    for (auto& it : items) n += it.type == ProgramItem::Block;
    return n;
}

size_t Program::swapCount(SwapOp::Kind kind) const {
    size_t n = 0;
    for (auto& it : items) n += it.type == ProgramItem::Swap && it.swap.kind == kind;
    return n;
}

size_t Program::gateCount() const {
    size_t n = 0;
    for (auto& it : items)
        if (it.type == ProgramItem::Block) n += it.block.gates.size();
    return n;
}

// --------------------------------------------------------------------- Config

void Config::finalize() {
    if (totalQubits < 1) throw ConfigError("total_qbit must be at least 1");
    if (totalQubits > 40) throw ConfigError("total_qbit too large (max 40)");
    if (rankQubits < 0) throw ConfigError("rank_qbit must be non-negative");
    if (rankQubits >= totalQubits)
        throw ConfigError("rank_qbit must leave at least one in-rank qubit");
    int region = rankRegion();
    if (chunkQubits < 0) chunkQubits = std::min(10, region);
    if (cacheLineQubits < 0) cacheLineQubits = std::min(2, chunkQubits);
    if (fusionQubits < 0) fusionQubits = std::min(5, chunkQubits);
    if (bufferQubits < 0) bufferQubits = std::min(region, 28);
    if (chunkQubits < 1 || chunkQubits > region)
        throw ConfigError("chunk_qbit must be in [1, total_qbit - rank_qbit]");
    if (cacheLineQubits < 0 || cacheLineQubits > chunkQubits)
        throw ConfigError("cache_line_qbit must be in [0, chunk_qbit]");
    if (fusionQubits > chunkQubits) throw ConfigError("fusion_qbit must not exceed chunk_qbit");
    if (fusionEnabled && fusionQubits < 1)
        throw ConfigError("fusion enabled but fusion_qbit < 1");
    if (bufferQubits < 0 || bufferQubits > region)
        throw ConfigError("buffer_qbit must be in [0, total_qbit - rank_qbit]");
}

// ------------------------------------------------------------------- helpers

namespace {

void stripComment(std::string& line) {
    size_t h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    h = line.find("//");
    if (h != std::string::npos) line.resize(h);
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

long parseLong(const std::string& tok, int lineNo, const char* what) {
    size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (...) {
        pos = 0;
    }
    if (pos != tok.size())
        throw ParseError("line " + std::to_string(lineNo) + ": bad " + what + " '" + tok + "'");
    return v;
}

double parseDouble(const std::string& tok, int lineNo, const char* what) {
    size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (...) {
        pos = 0;
    }
    if (pos != tok.size())
        throw ParseError("line " + std::to_string(lineNo) + ": bad " + what + " '" + tok + "'");
    return v;
}

bool lookupKind(const std::string& tok, GateKind& kind) {
    static const std::pair<const char*, GateKind> table[] = {
        {"H", GateKind::H},     {"U", GateKind::U},   {"X", GateKind::X},
        {"CX", GateKind::CX},   {"CP", GateKind::CP}, {"SWAP", GateKind::SWAP},
        {"RX", GateKind::RX},   {"RY", GateKind::RY}, {"RZ", GateKind::RZ},
        {"RZZ", GateKind::RZZ},
    };
    for (auto& e : table)
        if (tok == e.first) {
            kind = e.second;
            return true;
        }
    return false;
}

// "D4" -> (FusedDiag, 4); "U3" -> (FusedDense, 3); plain "U"/"D" do not match.
bool lookupFusedKind(const std::string& tok, GateKind& kind, int& k) {
    if (tok.size() < 2 || (tok[0] != 'D' && tok[0] != 'U')) return false;
    for (size_t i = 1; i < tok.size(); i++)
        if (!isdigit(static_cast<unsigned char>(tok[i]))) return false;
    kind = tok[0] == 'D' ? GateKind::FusedDiag : GateKind::FusedDense;
    k = std::stoi(tok.substr(1));
    return true;
}

}  // namespace

Gate parseGateLine(const std::string& rawLine, int lineNo) {
    std::string line = rawLine;
    stripComment(line);
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) throw ParseError("line " + std::to_string(lineNo) + ": empty gate line");

    GateKind kind;
    int fusedK = 0;
    if (lookupFusedKind(toks[0], kind, fusedK)) {
        if (fusedK < 1 || fusedK > 16)
            throw ParseError("line " + std::to_string(lineNo) + ": bad fused arity in '" +
                             toks[0] + "'");
        Gate g;
        g.kind = kind;
        size_t pos = 1;
        for (int i = 0; i < fusedK; i++) {
            if (pos >= toks.size())
                throw ParseError("line " + std::to_string(lineNo) + ": missing fused targets");
            g.targets.push_back(int(parseLong(toks[pos++], lineNo, "qubit")));
        }
        size_t entries = (kind == GateKind::FusedDiag) ? (size_t(1) << fusedK)
                                                       : (size_t(1) << (2 * fusedK));
        if (toks.size() < pos + 2 * entries)
            throw ParseError("line " + std::to_string(lineNo) + ": fused payload truncated");
        for (size_t i = 0; i < entries; i++) {
            double re = parseDouble(toks[pos++], lineNo, "payload");
            double im = parseDouble(toks[pos++], lineNo, "payload");
            g.payload.emplace_back(re, im);
        }
        // Optional provenance: "G <count>" then constituents in raw line order.
        if (pos < toks.size()) {
            if (toks[pos] != "G")
                throw ParseError("line " + std::to_string(lineNo) +
                                 ": unexpected token '" + toks[pos] + "' after fused payload");
            pos++;
            long cnt = parseLong(toks.at(pos++), lineNo, "constituent count");
            for (long i = 0; i < cnt; i++) {
                // Re-assemble the constituent tokens into a line and recurse.
                GateKind ck;
                if (pos >= toks.size() || !lookupKind(toks[pos], ck))
                    throw ParseError("line " + std::to_string(lineNo) + ": bad constituent");
                size_t need = 1 + size_t(kindArity(ck)) + 1 + size_t(kindParamCount(ck));
                if (pos + need > toks.size())
                    throw ParseError("line " + std::to_string(lineNo) +
                                     ": constituent truncated");
                std::string sub;
                for (size_t j = 0; j < need; j++) sub += toks[pos + j] + " ";
                pos += need;
                g.constituents.push_back(parseGateLine(sub, lineNo));
            }
            if (pos != toks.size())
                throw ParseError("line " + std::to_string(lineNo) + ": trailing tokens");
            long best = -1;
            for (auto& c : g.constituents)
                if (best < 0 || c.id < best) best = c.id;
            g.id = best;
        }
        std::set<int> uniq(g.targets.begin(), g.targets.end());
        if (int(uniq.size()) != fusedK)
            throw ParseError("line " + std::to_string(lineNo) + ": duplicate fused target");
        return g;
    }

    if (!lookupKind(toks[0], kind))
        throw ParseError("line " + std::to_string(lineNo) + ": unknown gate kind '" + toks[0] +
                         "'");
    int arity = kindArity(kind);
    int nParams = kindParamCount(kind);
    if (int(toks.size()) < 1 + arity + 1)
        throw ParseError("line " + std::to_string(lineNo) + ": gate line too short");
    if (int(toks.size()) > 1 + arity + 1 + nParams)
        throw ParseError("line " + std::to_string(lineNo) + ": too many fields");

    std::vector<int> qubits;
    for (int i = 0; i < arity; i++)
        qubits.push_back(int(parseLong(toks[1 + i], lineNo, "qubit")));
    long id = parseLong(toks[1 + arity], lineNo, "gate id");

    std::vector<double> params;
    for (size_t i = 1 + arity + 1; i < toks.size(); i++)
        params.push_back(parseDouble(toks[i], lineNo, "angle"));
    if (int(params.size()) < nParams) {
        std::cerr << "warning: line " << lineNo << ": " << kindName(kind) << " gate " << id
                  << " missing " << (nParams - int(params.size()))
                  << " angle(s), defaulting to 0\n";
        params.resize(nParams, 0.0);
    }

    std::set<int> uniq(qubits.begin(), qubits.end());
    if (uniq.size() != qubits.size())
        throw ParseError("line " + std::to_string(lineNo) + ": duplicate qubit in gate");
    for (int q : qubits)
        if (q < 0) throw ParseError("line " + std::to_string(lineNo) + ": negative qubit");

    // Control-first file order for CX/CP.
    if (kind == GateKind::CX || kind == GateKind::CP)
        return makeGate(kind, {qubits[1]}, {qubits[0]}, params, id);
    return makeGate(kind, qubits, {}, params, id);
}

std::string serializeGate(const Gate& g) {
    std::string out;
    if (g.kind == GateKind::FusedDiag || g.kind == GateKind::FusedDense) {
        out = (g.kind == GateKind::FusedDiag ? "D" : "U") + std::to_string(g.targets.size());
        for (int q : g.targets) out += " " + std::to_string(q);
        for (const Amp& a : g.payload)
            out += " " + fmt17(a.real()) + " " + fmt17(a.imag());
        if (!g.constituents.empty()) {
            out += " G " + std::to_string(g.constituents.size());
            for (const Gate& c : g.constituents) out += " " + serializeGate(c);
        }
        return out;
    }
    out = kindName(g.kind);
    for (int q : g.qubits()) out += " " + std::to_string(q);
    out += " " + std::to_string(g.id);
    for (double p : g.params) out += " " + fmt17(p);
    return out;
}

// ---------------------------------------------------------------- raw circuit

Circuit parseCircuit(std::istream& in, int nQubits) {
    Circuit c;
    std::string line;
    int lineNo = 0;
    int maxQubit = -1;
    std::set<long> ids;
    while (std::getline(in, line)) {
        lineNo++;
        stripComment(line);
        if (tokenize(line).empty()) continue;
        Gate g = parseGateLine(line, lineNo);
        if (g.kind == GateKind::FusedDiag || g.kind == GateKind::FusedDense)
            throw ParseError("line " + std::to_string(lineNo) +
                             ": fused gates are not valid in a raw circuit");
        if (g.id < 0) throw ParseError("line " + std::to_string(lineNo) + ": negative gate id");
        if (!ids.insert(g.id).second)
            throw ParseError("line " + std::to_string(lineNo) + ": duplicate gate id " +
                             std::to_string(g.id));
        for (int q : g.qubits()) {
            if (nQubits >= 0 && q >= nQubits)
                throw ParseError("line " + std::to_string(lineNo) + ": qubit " +
                                 std::to_string(q) + " out of range (n=" +
                                 std::to_string(nQubits) + ")");
            maxQubit = std::max(maxQubit, q);
        }
        c.gates.push_back(std::move(g));
    }
    c.nQubits = nQubits >= 0 ? nQubits : maxQubit + 1;
    return c;
}

Circuit parseCircuitFile(const std::string& path, int nQubits) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open circuit file: " + path);
    return parseCircuit(in, nQubits);
}

std::string serializeCircuit(const Circuit& c) {
    std::string out;
    for (const Gate& g : c.gates) out += serializeGate(g) + "\n";
    return out;
}

// ------------------------------------------------------------------- program

namespace {

SwapOp parseSwapLine(const std::vector<std::string>& toks, int lineNo) {
    SwapOp op;
    op.kind = toks[0] == "SQS" ? SwapOp::InMemory : SwapOp::CrossRank;
    long s = parseLong(toks.at(1), lineNo, "swap size");
    if (s < 1) throw ParseError("line " + std::to_string(lineNo) + ": swap size must be >= 1");
    if (int(toks.size()) != 2 + 2 * s)
        throw ParseError("line " + std::to_string(lineNo) + ": swap line has wrong field count");
    std::vector<int> a(s), b(s);
    for (long i = 0; i < s; i++) a[i] = int(parseLong(toks[2 + i], lineNo, "position"));
    for (long i = 0; i < s; i++) b[i] = int(parseLong(toks[2 + s + i], lineNo, "position"));
    std::set<int> seen;
    for (long i = 0; i < s; i++) {
        if (i > 0 && (a[i] <= a[i - 1] || b[i] <= b[i - 1]))
            throw ParseError("line " + std::to_string(lineNo) +
                             ": swap position lists must be ascending");
        if (a[i] < 0 || b[i] < 0)
            throw ParseError("line " + std::to_string(lineNo) + ": negative position");
        seen.insert(a[i]);
        seen.insert(b[i]);
        op.pairs.emplace_back(a[i], b[i]);
    }
    if (int(seen.size()) != 2 * s)
        throw ParseError("line " + std::to_string(lineNo) + ": swap positions overlap");
    return op;
}

void checkSwapOp(const SwapOp& op, const Config& cfg, int lineNo, bool lenient) {
    int region = cfg.rankRegion();
    for (auto& pr : op.pairs) {
        if (pr.first >= cfg.totalQubits || pr.second >= cfg.totalQubits)
            throw ParseError("line " + std::to_string(lineNo) + ": swap position exceeds N");
        if (lenient) continue;
        if (op.kind == SwapOp::InMemory) {
            if (pr.first >= region || pr.second >= region)
                throw ParseError("line " + std::to_string(lineNo) +
                                 ": SQS position reaches into the rank bits");
        } else {
            if (pr.first >= region)
                throw ParseError("line " + std::to_string(lineNo) +
                                 ": CSQS out-position must be in-rank");
            if (pr.second < region)
                throw ParseError("line " + std::to_string(lineNo) +
                                 ": CSQS in-position must be a rank bit");
        }
    }
}

}  // namespace

Program parseProgram(std::istream& in, const Config& cfg, bool lenient) {
    Program p;
    p.nQubits = cfg.totalQubits;
    p.rankQubits = cfg.rankQubits;
    p.chunkQubits = cfg.chunkQubits;
    p.finalLayout = QubitLayout::identity(cfg.totalQubits);

    std::vector<std::pair<int, std::vector<std::string>>> lines;  // (lineNo, tokens)
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        lineNo++;
        stripComment(line);
        auto toks = tokenize(line);
        if (!toks.empty()) lines.emplace_back(lineNo, std::move(toks));
    }

    size_t i = 0;
    while (i < lines.size()) {
        auto& [no, toks] = lines[i];
        if (toks[0] == "SQS" || toks[0] == "CSQS") {
            SwapOp op = parseSwapLine(toks, no);
            checkSwapOp(op, cfg, no, lenient);
            p.finalLayout.applyPairs(op.pairs);
            p.items.push_back(ProgramItem::makeSwap(std::move(op)));
            i++;
            continue;
        }
        if (toks.size() != 1)
            throw ParseError("line " + std::to_string(no) + ": expected record header");
        long k = parseLong(toks[0], no, "record size");
        if (k < 1) throw ParseError("line " + std::to_string(no) + ": record size must be >= 1");
        if (i + k >= lines.size() + 1 && i + k > lines.size())
            throw ParseError("line " + std::to_string(no) + ": record truncated");
        // A size-1 record wrapping a swap line is a SwapOp, not a block.
        if (k == 1 && i + 1 < lines.size() &&
            (lines[i + 1].second[0] == "SQS" || lines[i + 1].second[0] == "CSQS")) {
            SwapOp op = parseSwapLine(lines[i + 1].second, lines[i + 1].first);
            checkSwapOp(op, cfg, lines[i + 1].first, lenient);
            p.finalLayout.applyPairs(op.pairs);
            p.items.push_back(ProgramItem::makeSwap(std::move(op)));
            i += 2;
            continue;
        }
        GateBlock blk;
        for (long j = 0; j < k; j++) {
            if (i + 1 + j >= lines.size())
                throw ParseError("line " + std::to_string(no) + ": record truncated");
            auto& [gno, gtoks] = lines[i + 1 + j];
            if (gtoks[0] == "SQS" || gtoks[0] == "CSQS")
                throw ParseError("line " + std::to_string(gno) +
                                 ": swap line inside a gate block");
            std::string joined;
            for (auto& t : gtoks) joined += t + " ";
            Gate g = parseGateLine(joined, gno);
            int bound = lenient ? cfg.totalQubits : cfg.chunkQubits;
            for (int q : g.qubits())
                if (q >= bound)
                    throw ParseError("line " + std::to_string(gno) + ": gate position " +
                                     std::to_string(q) + " outside the chunk");
            blk.gates.push_back(std::move(g));
        }
        p.items.push_back(ProgramItem::makeBlock(std::move(blk)));
        i += 1 + k;
    }
    return p;
}

Program parseProgramFile(const std::string& path, const Config& cfg, bool lenient) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open program file: " + path);
    return parseProgram(in, cfg, lenient);
}

std::string serializeProgram(const Program& p) {
    std::string out;
    for (const ProgramItem& it : p.items) {
        if (it.type == ProgramItem::Block) {
            out += std::to_string(it.block.gates.size()) + "\n";
            for (const Gate& g : it.block.gates) out += serializeGate(g) + "\n";
        } else {
            const SwapOp& op = it.swap;
            out += "1\n";
            out += op.kind == SwapOp::InMemory ? "SQS " : "CSQS ";
            out += std::to_string(op.pairs.size());
            for (auto& pr : op.pairs) out += " " + std::to_string(pr.first);
            for (auto& pr : op.pairs) out += " " + std::to_string(pr.second);
            out += "\n";
        }
    }
    return out;
}

// -------------------------------------------------------------------- config

Config parseConfig(std::istream& in) {
    Config cfg;
    std::string line;
    int lineNo = 0;
    std::string section;
    bool sawTotal = false;
    while (std::getline(in, line)) {
        lineNo++;
        stripComment(line);
        std::string trimmed;
        for (char ch : line)
            if (!isspace(static_cast<unsigned char>(ch))) trimmed += ch;
        if (trimmed.empty()) continue;
        if (trimmed.front() == '[') {
            if (trimmed.back() != ']')
                throw ConfigError("config line " + std::to_string(lineNo) + ": bad section");
            section = trimmed.substr(1, trimmed.size() - 2);
            if (section != "system")
                throw ConfigError("config line " + std::to_string(lineNo) +
                                  ": unknown section [" + section + "]");
            continue;
        }
        size_t eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineNo) + ": expected key=value");
        if (section != "system")
            throw ConfigError("config line " + std::to_string(lineNo) +
                              ": key outside [system] section");
        std::string key = trimmed.substr(0, eq);
        std::string val = trimmed.substr(eq + 1);
        long v;
        try {
            size_t pos = 0;
            v = std::stol(val, &pos);
            if (pos != val.size()) throw std::invalid_argument(val);
        } catch (...) {
            throw ConfigError("config line " + std::to_string(lineNo) + ": bad value '" + val +
                              "' for " + key);
        }
        if (key == "total_qbit") { cfg.totalQubits = int(v); sawTotal = true; }
        else if (key == "rank_qbit") cfg.rankQubits = int(v);
        else if (key == "buffer_qbit") cfg.bufferQubits = int(v);
        else if (key == "chunk_qbit") cfg.chunkQubits = int(v);
        else if (key == "fusion_qbit") cfg.fusionQubits = int(v);
        else if (key == "cache_line_qbit") cfg.cacheLineQubits = int(v);
        else if (key == "ims") cfg.imsEnabled = v != 0;
        else if (key == "xrs") cfg.xrsEnabled = v != 0;
        else if (key == "fusion") cfg.fusionEnabled = v != 0;
        else if (key == "diagonal_fusion") cfg.diagonalFusionEnabled = v != 0;
        else
            throw ConfigError("config line " + std::to_string(lineNo) + ": unknown key '" + key +
                              "'");
    }
    if (!sawTotal) throw ConfigError("config is missing total_qbit");
    cfg.finalize();
    return cfg;
}

Config parseConfigFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parseConfig(in);
}

std::string serializeConfig(const Config& cfg) {
    std::string out = "[system]\n";
    out += "total_qbit=" + std::to_string(cfg.totalQubits) + "\n";
    out += "rank_qbit=" + std::to_string(cfg.rankQubits) + "\n";
    out += "buffer_qbit=" + std::to_string(cfg.bufferQubits) + "\n";
    out += "chunk_qbit=" + std::to_string(cfg.chunkQubits) + "\n";
    out += "fusion_qbit=" + std::to_string(cfg.fusionQubits) + "\n";
    out += "cache_line_qbit=" + std::to_string(cfg.cacheLineQubits) + "\n";
    out += "ims=" + std::to_string(cfg.imsEnabled ? 1 : 0) + "\n";
    out += "xrs=" + std::to_string(cfg.xrsEnabled ? 1 : 0) + "\n";
    out += "fusion=" + std::to_string(cfg.fusionEnabled ? 1 : 0) + "\n";
    out += "diagonal_fusion=" + std::to_string(cfg.diagonalFusionEnabled ? 1 : 0) + "\n";
    return out;
}

}  // namespace quokka
