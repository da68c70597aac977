#pragma once

#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "patchwind/core.hpp"
#include "patchwind/curve.hpp"
#include "patchwind/diagnostics.hpp"

namespace patchwind {

// ---------------------------------------------------------------------------
// Formatting: 17 significant digits round-trip doubles exactly, 12 are used
// for CSV.  snprintf with the C locale keeps bytes identical across runs.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt_g(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

}  // namespace detail

inline std::string fmt17(double v) { return detail::fmt_g(v, 17); }
inline std::string fmt12(double v) { return detail::fmt_g(v, 12); }

// Write-to-temp-then-rename; readers never observe partial files.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for write: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Boundary files: plain-text header plus one "x1 x2" pair per line.
// Diff-able and language-neutral.
// ---------------------------------------------------------------------------

inline std::string boundary_to_string(const PatchBoundary& b, const TrackedArc* tracked) {
    std::string s;
    s += "patchwind-boundary v1\n";
    s += "strength " + fmt17(b.strength) + "\n";
    s += "components " + std::to_string(b.components.size()) + "\n";
    if (tracked != nullptr) {
        s += "tracked " + std::to_string(tracked->component) + " " +
             std::to_string(tracked->inner_node) + " " + std::to_string(tracked->outer_node) +
             " " + std::to_string(tracked->arc_begin) + " " + std::to_string(tracked->arc_end) +
             "\n";
    }
    for (std::size_t k = 0; k < b.components.size(); ++k) {
        const auto& c = b.components[k];
        s += "component " + std::to_string(k) + " " + std::to_string(c.nodes.size()) + " " +
             std::to_string(c.closed ? 1 : 0) + " " + std::to_string(c.orientation) + "\n";
        for (const auto& p : c.nodes) s += fmt17(p.x1) + " " + fmt17(p.x2) + "\n";
    }
    return s;
}

struct BoundaryFile {
    PatchBoundary boundary;
    bool has_tracked = false;
    TrackedArc tracked;
};

inline BoundaryFile boundary_from_stream(std::istream& in) {
    BoundaryFile out;
    std::string line;
    if (!std::getline(in, line) || line != "patchwind-boundary v1")
        throw IoError("boundary file: bad magic line");
    std::size_t n_components = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "strength") {
            ls >> out.boundary.strength;
        } else if (key == "components") {
            ls >> n_components;
        } else if (key == "tracked") {
            out.has_tracked = true;
            ls >> out.tracked.component >> out.tracked.inner_node >> out.tracked.outer_node >>
                out.tracked.arc_begin >> out.tracked.arc_end;
        } else if (key == "component") {
            std::size_t idx = 0, n_nodes = 0;
            int closed = 1, orient = 1;
            ls >> idx >> n_nodes >> closed >> orient;
            MarkedCurve c;
            c.closed = closed != 0;
            c.orientation = orient;
            c.nodes.reserve(n_nodes);
            for (std::size_t i = 0; i < n_nodes; ++i) {
                if (!std::getline(in, line)) throw IoError("boundary file: truncated node list");
                Point2 p;
                if (std::sscanf(line.c_str(), "%lf %lf", &p.x1, &p.x2) != 2)
                    throw IoError("boundary file: bad node line: " + line);
                c.nodes.push_back(p);
            }
            out.boundary.components.push_back(std::move(c));
        } else if (key.empty()) {
            continue;
        } else {
            throw IoError("boundary file: unknown key '" + key + "'");
        }
    }
    if (out.boundary.components.size() != n_components)
        throw IoError("boundary file: component count mismatch");
    return out;
}

inline void write_boundary(const std::filesystem::path& path, const PatchBoundary& b,
                           const TrackedArc* tracked = nullptr) {
    atomic_write(path, boundary_to_string(b, tracked));
}

inline BoundaryFile read_boundary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open boundary file: " + path.string());
    return boundary_from_stream(in);
}

// ---------------------------------------------------------------------------
// Snapshots: full run state (positions at 17 digits, ledgers, step counter)
// so a resumed run reproduces the uninterrupted byte stream.  Gzip beyond
// 10^4 nodes.
// ---------------------------------------------------------------------------

struct Snapshot {
    long step = 0;
    double dt = 0.0;
    double dt_current = 0.0;
    PatchState state;
};

inline std::string snapshot_to_string(const Snapshot& s) {
    std::string out;
    out += "patchwind-snapshot v1\n";
    out += "step " + std::to_string(s.step) + "\n";
    out += "dt " + fmt17(s.dt) + "\n";
    out += "dt_current " + fmt17(s.dt_current) + "\n";
    out += "t " + fmt17(s.state.t) + "\n";
    out += "area0 " + fmt17(s.state.area0) + "\n";
    out += "arc_winding0 " + fmt17(s.state.arc_winding0) + "\n";
    out += "symmetry_clamped " + std::to_string(s.state.symmetry_clamped ? 1 : 0) + "\n";
    const auto ledger_line = [](const char* name, const WindingLedger& l) {
        std::string r = name;
        r += " " + fmt17(l.center.x1) + " " + fmt17(l.center.x2) + " " + fmt17(l.initial_angle) +
             " " + fmt17(l.lift.lifted_angle) + " " + fmt17(l.kinematic_angle) + " " +
             fmt17(l.lift.last_point.x1) + " " + fmt17(l.lift.last_point.x2) + "\n";
        return r;
    };
    if (s.state.has_tracked) {
        out += ledger_line("inner_ledger", s.state.inner_ledger);
        out += ledger_line("outer_ledger", s.state.outer_ledger);
    }
    out += boundary_to_string(s.state.boundary, s.state.has_tracked ? &s.state.tracked : nullptr);
    return out;
}

inline Snapshot snapshot_from_string(const std::string& text) {
    std::istringstream in(text);
    Snapshot s;
    std::string line;
    if (!std::getline(in, line) || line != "patchwind-snapshot v1")
        throw IoError("snapshot: bad magic line");
    const auto parse_ledger = [](std::istringstream& ls) {
        Point2 c, last;
        double init, lifted, kin;
        ls >> c.x1 >> c.x2 >> init >> lifted >> kin >> last.x1 >> last.x2;
        WindingLedger l(c, last);
        l.initial_angle = init;
        l.lift.lifted_angle = lifted;
        l.kinematic_angle = kin;
        return l;
    };
    std::streampos boundary_pos = in.tellg();
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "step") ls >> s.step;
        else if (key == "dt") ls >> s.dt;
        else if (key == "dt_current") ls >> s.dt_current;
        else if (key == "t") ls >> s.state.t;
        else if (key == "area0") ls >> s.state.area0;
        else if (key == "arc_winding0") ls >> s.state.arc_winding0;
        else if (key == "symmetry_clamped") {
            int v;
            ls >> v;
            s.state.symmetry_clamped = v != 0;
        } else if (key == "inner_ledger") s.state.inner_ledger = parse_ledger(ls);
        else if (key == "outer_ledger") s.state.outer_ledger = parse_ledger(ls);
        else if (key == "patchwind-boundary") break;
        boundary_pos = in.tellg();
    }
    in.clear();
    in.seekg(boundary_pos);
    BoundaryFile bf = boundary_from_stream(in);
    s.state.boundary = std::move(bf.boundary);
    s.state.has_tracked = bf.has_tracked;
    s.state.tracked = bf.tracked;
    return s;
}

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
    const std::string text = snapshot_to_string(s);
    std::size_t nodes = 0;
    for (const auto& c : s.state.boundary.components) nodes += c.nodes.size();
    if (nodes > 10000) {
        const std::string gzpath = path.string() + ".gz";
        const std::string tmp = gzpath + ".tmp";
        gzFile f = gzopen(tmp.c_str(), "wb6");
        if (f == nullptr) throw IoError("cannot open snapshot for write: " + gzpath);
        const int written = gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
        gzclose(f);
        if (written != static_cast<int>(text.size()))
            throw IoError("short gzip write: " + gzpath);
        std::filesystem::rename(tmp, gzpath);
    } else {
        atomic_write(path, text);
    }
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
    const bool gz = path.extension() == ".gz";
    std::string text;
    if (gz) {
        gzFile f = gzopen(path.c_str(), "rb");
        if (f == nullptr) throw IoError("cannot open snapshot: " + path.string());
        char buf[1 << 16];
        int n;
        while ((n = gzread(f, buf, sizeof(buf))) > 0) text.append(buf, static_cast<std::size_t>(n));
        gzclose(f);
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open snapshot: " + path.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return snapshot_from_string(text);
}

// ---------------------------------------------------------------------------
// Diagnostics CSV
// ---------------------------------------------------------------------------

inline const char* kCsvHeader =
    "t,perimeter,area,turns_inner,turns_outer,stability_gap,"
    "contain_inner,contain_outer,contain_arc,node_count\n";

inline std::string csv_row(const DiagnosticsRow& r) {
    std::string s;
    s += fmt12(r.t) + "," + fmt12(r.perimeter) + "," + fmt12(r.area) + "," +
         fmt12(r.turns_inner) + "," + fmt12(r.turns_outer) + "," + fmt12(r.stability_gap) + "," +
         (r.contain_inner ? "1" : "0") + "," + (r.contain_outer ? "1" : "0") + "," +
         (r.contain_arc ? "1" : "0") + "," + std::to_string(r.node_count) + "\n";
    return s;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : path_(path) { buf_ = kCsvHeader; }
    void add(const DiagnosticsRow& r) { buf_ += csv_row(r); }
    const std::string& content() const { return buf_; }
    void flush() const { atomic_write(path_, buf_); }

private:
    std::filesystem::path path_;
    std::string buf_;
};

// ---------------------------------------------------------------------------
// Config files: a flat key = value tree with dotted keys.  Unknown keys are
// errors so presets cannot drift silently.
// ---------------------------------------------------------------------------

using ConfigMap = std::map<std::string, std::string>;

inline ConfigMap parse_config_text(const std::string& text) {
    ConfigMap m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        if (m.count(key))
            throw ConfigError("config: duplicate key '" + key + "'");
        m[key] = val;
    }
    return m;
}

inline ConfigMap parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace patchwind
