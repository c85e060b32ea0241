#pragma once

// Persistence: JSON configs, line-delimited elite records, CSV helpers and
// the run manifest written next to every output.

#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffstam/errors.hpp"
#include "ffstam/precision.hpp"
#include "ffstam/search.hpp"

#ifndef FFSTAM_VERSION
#define FFSTAM_VERSION "0.1.0"
#endif

namespace ffstam {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = FFSTAM_VERSION;

// ---------------------------------------------------------------------------
// Search configuration

inline json to_json(const SearchConfig& c) {
    return json{{"n", c.n},
                {"p", c.p},
                {"objective", to_string(c.objective)},
                {"restarts", c.restarts},
                {"rounds", c.rounds},
                {"steps_per_restart", c.steps_per_restart},
                {"init_step", c.init_step},
                {"step_decay", c.step_decay},
                {"min_gap", c.min_gap},
                {"min_gap_relative", c.min_gap_relative},
                {"top_k", c.top_k},
                {"seed", c.seed},
                {"gauge", to_string(c.gauge)},
                {"refine_steps", c.refine_steps},
                {"symmetry_prob", c.symmetry_prob},
                {"reseed_step_scale", c.reseed_step_scale}};
}

namespace detail {

template <class T>
void read_field(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("config field '") + key + "': " + e.what());
    }
}

}  // namespace detail

/// Missing keys keep their defaults; keys outside `extra_keys` and the
/// SearchConfig fields are rejected so typos do not pass silently.
inline SearchConfig search_config_from_json(const json& j, const std::set<std::string>& extra_keys = {}) {
    if (!j.is_object()) throw InvalidArgument("config: expected a JSON object");
    SearchConfig c;
    const json known = to_json(c);
    for (const auto& [k, v] : j.items()) {
        if (!known.contains(k) && !extra_keys.count(k)) throw InvalidArgument("config: unknown key '" + k + "'");
    }
    detail::read_field(j, "n", c.n);
    detail::read_field(j, "p", c.p);
    if (j.contains("objective")) c.objective = parse_objective(j.at("objective").get<std::string>());
    detail::read_field(j, "restarts", c.restarts);
    detail::read_field(j, "rounds", c.rounds);
    detail::read_field(j, "steps_per_restart", c.steps_per_restart);
    detail::read_field(j, "init_step", c.init_step);
    detail::read_field(j, "step_decay", c.step_decay);
    detail::read_field(j, "min_gap", c.min_gap);
    detail::read_field(j, "min_gap_relative", c.min_gap_relative);
    detail::read_field(j, "top_k", c.top_k);
    detail::read_field(j, "seed", c.seed);
    if (j.contains("gauge")) c.gauge = parse_gauge(j.at("gauge").get<std::string>());
    detail::read_field(j, "refine_steps", c.refine_steps);
    detail::read_field(j, "symmetry_prob", c.symmetry_prob);
    detail::read_field(j, "reseed_step_scale", c.reseed_step_scale);
    c.validate();
    return c;
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("malformed JSON in " + path.string() + ": " + e.what());
    }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

/// Sweep config: SearchConfig fields as the template plus `n_list` and `p_list`.
struct SweepConfig {
    std::vector<std::size_t> n_list;
    std::vector<double> p_list;
    SearchConfig tmpl;

    std::vector<std::pair<std::size_t, double>> grid() const {
        std::vector<std::pair<std::size_t, double>> g;
        for (auto n : n_list)
            for (double p : p_list) g.emplace_back(n, p);
        return g;
    }
};

inline SweepConfig sweep_config_from_json(const json& j) {
    SweepConfig s;
    s.tmpl = search_config_from_json(j, {"n_list", "p_list"});
    detail::read_field(j, "n_list", s.n_list);
    detail::read_field(j, "p_list", s.p_list);
    if (s.n_list.empty() || s.p_list.empty()) throw InvalidArgument("sweep config: n_list and p_list must be nonempty");
    return s;
}

// ---------------------------------------------------------------------------
// Root vectors and elite records

/// Reads roots from a JSON array or from numbers separated by whitespace or
/// commas. Lines starting with '#' are skipped.
inline std::vector<double> read_roots_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        try {
            return json::parse(text).get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw InvalidArgument("bad root array in " + path.string() + ": " + e.what());
        }
    }
    std::vector<double> out;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        for (char& ch : line)
            if (ch == ',' || ch == ';') ch = ' ';
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            try {
                std::size_t used = 0;
                out.push_back(std::stod(tok, &used));
                if (used != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw InvalidArgument("not a number in " + path.string() + ": '" + tok + "'");
            }
        }
    }
    if (out.empty()) throw InvalidArgument("no roots in " + path.string());
    return out;
}

inline json elite_record(const EliteEntry& e, std::size_t n, double p, Objective obj) {
    return json{{"n", n},
                {"p", p},
                {"objective", to_string(obj)},
                {"value", e.objective},
                {"alpha", e.alpha.values()},
                {"beta", e.beta.values()},
                {"g_p", e.g_p},
                {"rho_p", e.rho_p},
                {"D", e.diag.D},
                {"d_PQ", e.diag.d_PQ}};
}

inline void write_elites(const std::filesystem::path& path, const EliteBuffer& buf, std::size_t n, double p,
                         Objective obj) {
    std::ostringstream os;
    for (const auto& e : buf.entries()) os << elite_record(e, n, p, obj).dump() << '\n';
    write_text(path, os.str());
}

struct EliteFile {
    std::size_t n = 0;
    double p = 0.0;
    Objective objective = Objective::g_p;
    std::vector<EliteEntry> entries;
};

inline EliteFile read_elites(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    EliteFile f;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            const std::size_t n = j.at("n").get<std::size_t>();
            const double p = j.at("p").get<double>();
            if (f.entries.empty()) {
                f.n = n;
                f.p = p;
                f.objective = parse_objective(j.at("objective").get<std::string>());
            } else if (n != f.n) {
                throw DegreeMismatch("mixed degrees in " + path.string());
            }
            EliteEntry e;
            e.alpha = RootConfig<double>::from_unsorted(j.at("alpha").get<std::vector<double>>());
            e.beta = RootConfig<double>::from_unsorted(j.at("beta").get<std::vector<double>>());
            if (e.alpha.degree() != n || e.beta.degree() != n) throw DegreeMismatch("root count differs from n");
            e.objective = j.at("value").get<double>();
            e.g_p = j.value("g_p", 0.0);
            e.rho_p = j.value("rho_p", 0.0);
            e.diag.D = j.value("D", 0.0);
            e.diag.d_PQ = j.value("d_PQ", 0.0);
            f.entries.push_back(std::move(e));
        } catch (const json::exception& e) {
            throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest text that reads back to the same double.
inline std::string fmt(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    /// `preamble` lines go above the header as '# ' comments.
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::string>& preamble = {})
        : out_(path) {
        if (!out_) throw IoError("cannot write " + path.string());
        for (const auto& line : preamble) out_ << "# " << line << '\n';
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

// ---------------------------------------------------------------------------
// Manifest

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    json config = json::object();
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    json precision = json::object();
    std::vector<std::string> outputs;
    json metadata = json::object();
    std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
    double wall_seconds = 0.0;
    std::string status = "ok";
    json error = nullptr;

    json to_json() const {
        return json{{"command", command},   {"argv", argv},
                    {"config", config},     {"seed", seed},
                    {"version", version},   {"precision", precision},
                    {"outputs", outputs},   {"metadata", metadata},
                    {"started_utc", utc_timestamp(started)},
                    {"wall_seconds", wall_seconds},
                    {"status", status},     {"error", error}};
    }

    void write(const std::filesystem::path& dir) const {
        write_text(dir / "manifest.json", to_json().dump(2) + "\n");
    }
};

inline json precision_json(const PrecisionContext& ctx, const std::string& source) {
    return json{{"digits", ctx.digits}, {"newton_tol", ctx.newton_tol}, {"max_iter", ctx.max_iter}, {"source", source}};
}

/// {"error": {"category": ..., "message": ...}}
inline json error_json(std::string_view category, const std::string& message) {
    return json{{"error", {{"category", category}, {"message", message}}}};
}

}  // namespace ffstam
