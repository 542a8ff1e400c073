#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "compacton/compacton_theory.hpp"
#include "compacton/errors.hpp"
#include "compacton/knn_dynamics.hpp"

namespace compacton {

/// Malformed configuration text. Carries the 1-based line and, when known, the key.
class ParseError : public InvalidArgument {
public:
    ParseError(const std::string& message, int line, std::string key = {})
        : InvalidArgument(format(message, line, key)), line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(const std::string& message, int line, const std::string& key) {
        std::string out = "line " + std::to_string(line);
        if (!key.empty()) out += " (key '" + key + "')";
        return out + ": " + message;
    }

    int line_;
    std::string key_;
};

/// A well-formed configuration that breaks an ExperimentConfig invariant.
class ValidationError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

// ---------------------------------------------------------------------------
// Flat key = value documents (a TOML subset): numbers, "strings", and
// possibly nested [arrays] that may span lines. '#' starts a comment.

namespace kv {

struct Value {
    std::variant<double, std::string, std::vector<Value>> data;
    int line = 0;

    bool is_number() const noexcept { return std::holds_alternative<double>(data); }
    bool is_string() const noexcept { return std::holds_alternative<std::string>(data); }
    bool is_array() const noexcept { return std::holds_alternative<std::vector<Value>>(data); }
    double number() const { return std::get<double>(data); }
    const std::string& string() const { return std::get<std::string>(data); }
    const std::vector<Value>& array() const { return std::get<std::vector<Value>>(data); }
};

using Document = std::map<std::string, Value>;

namespace detail {

class Cursor {
public:
    Cursor(std::string_view text, int line, std::string key) : text_(text), line_(line), key_(std::move(key)) {}

    Value parse_value() {
        skip_space();
        if (at_end()) fail("missing value");
        const char ch = text_[pos_];
        Value v;
        v.line = line_;
        if (ch == '"') {
            v.data = parse_string();
        } else if (ch == '[') {
            v.data = parse_array();
        } else {
            v.data = parse_number();
        }
        return v;
    }

    void expect_end() {
        skip_space();
        if (!at_end()) fail("unexpected trailing characters '" + std::string(text_.substr(pos_)) + "'");
    }

private:
    bool at_end() const noexcept { return pos_ >= text_.size(); }

    void skip_space() {
        while (!at_end()) {
            const char ch = text_[pos_];
            if (ch == '\n') {
                ++line_;
                ++pos_;
            } else if (ch == ' ' || ch == '\t' || ch == '\r') {
                ++pos_;
            } else if (ch == '#') {
                while (!at_end() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, key_); }

    std::string parse_string() {
        ++pos_;
        std::string out;
        while (true) {
            if (at_end() || text_[pos_] == '\n') fail("unterminated string");
            const char ch = text_[pos_++];
            if (ch == '"') break;
            if (ch == '\\') {
                if (at_end()) fail("unterminated escape");
                const char e = text_[pos_++];
                switch (e) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += ch;
            }
        }
        return out;
    }

    std::vector<Value> parse_array() {
        ++pos_;
        std::vector<Value> items;
        while (true) {
            skip_space();
            if (at_end()) fail("unterminated array");
            if (text_[pos_] == ']') {
                ++pos_;
                return items;
            }
            items.push_back(parse_value());
            skip_space();
            if (at_end()) fail("unterminated array");
            if (text_[pos_] == ',') {
                ++pos_;
            } else if (text_[pos_] != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    double parse_number() {
        const std::size_t start = pos_;
        while (!at_end()) {
            const char ch = text_[pos_];
            const bool numeric = (ch >= '0' && ch <= '9') || ch == '.' || ch == 'e' || ch == 'E' || ch == '+' ||
                                 ch == '-' || ch == '_';
            if (!numeric) break;
            ++pos_;
        }
        std::string token(text_.substr(start, pos_ - start));
        std::erase(token, '_');
        if (!token.empty() && token.front() == '+') token.erase(0, 1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
            fail("expected a number, string or array");
        }
        return value;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
    std::string key_;
};

inline bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    for (char ch : key) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_' ||
                        ch == '-';
        if (!ok) return false;
    }
    return true;
}

inline int bracket_depth_change(std::string_view line) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (in_string) {
            if (ch == '\\') ++i;
            else if (ch == '"') in_string = false;
        } else if (ch == '"') {
            in_string = true;
        } else if (ch == '#') {
            break;
        } else if (ch == '[') {
            ++depth;
        } else if (ch == ']') {
            --depth;
        }
    }
    return depth;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

inline Document parse(std::string_view text) {
    Document doc;
    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start <= text.size();) {
        const std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, end - start));
        start = end + 1;
    }

    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i) + 1;
        const std::string_view line = detail::trim(lines[i]);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') throw ParseError("tables are not supported; use flat keys", line_no);
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
        const std::string key(detail::trim(line.substr(0, eq)));
        if (!detail::valid_key(key)) throw ParseError("invalid key '" + key + "'", line_no);
        if (doc.count(key) != 0) throw ParseError("duplicate key", line_no, key);

        // Arrays may continue over following lines until the brackets balance.
        std::string value_text(line.substr(eq + 1));
        int depth = detail::bracket_depth_change(value_text);
        while (depth > 0 && i + 1 < lines.size()) {
            ++i;
            value_text += '\n';
            value_text += lines[i];
            depth += detail::bracket_depth_change(lines[i]);
        }
        detail::Cursor cur(value_text, line_no, key);
        Value v = cur.parse_value();
        cur.expect_end();
        doc.emplace(key, std::move(v));
    }
    return doc;
}

} // namespace kv

// ---------------------------------------------------------------------------

enum class Scenario { one_compacton, collision, long_run };
enum class Alpha2Mode { zero, automatic, explicit_value };

inline const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::one_compacton: return "one-compacton";
    case Scenario::collision: return "collision";
    case Scenario::long_run: return "long-run";
    }
    return "unknown";
}

inline const char* to_string(Alpha2Mode m) {
    switch (m) {
    case Alpha2Mode::zero: return "zero";
    case Alpha2Mode::automatic: return "auto";
    case Alpha2Mode::explicit_value: return "explicit";
    }
    return "unknown";
}

struct ExperimentConfig {
    Scenario scenario = Scenario::one_compacton;
    double n = 2.0;
    /// As written in the document ("5/3" or "2"); used for labels.
    std::string n_text = "2";
    std::vector<CompactonSpec> compactons;
    double c0 = 0.0;
    double alpha4 = 0.0;
    Alpha2Mode alpha2_mode = Alpha2Mode::zero;
    double alpha2_explicit = 0.0;
    double L = 0.0;
    double dx = 0.1;
    double dt = 0.1;
    double T = 100.0;
    std::vector<double> snapshot_times;
    std::size_t diagnostics_stride = 100;
    std::filesystem::path output_dir = "out";
    double newton_tol = 1e-12;
    int newton_max = 25;
    double blowup_factor = 10.0;

    double resolved_alpha2() const {
        switch (alpha2_mode) {
        case Alpha2Mode::zero: return 0.0;
        case Alpha2Mode::automatic: return alpha2_star(n, alpha4);
        case Alpha2Mode::explicit_value: return alpha2_explicit;
        }
        return 0.0;
    }

    ModelParams model() const { return {n, c0, resolved_alpha2(), alpha4}; }
    TimeStepper stepper() const { return {dt, newton_tol, newton_max, blowup_factor}; }
};

/// Domain length used when a document does not set L. One-compacton runs get
/// room for the whole excursion plus six support widths; multi-compacton
/// runs default to 600.
inline double default_domain_length(const ExperimentConfig& cfg) {
    if (cfg.scenario == Scenario::one_compacton && !cfg.compactons.empty()) {
        return std::abs(cfg.compactons.front().c - cfg.c0) * cfg.T + 6.0 * support_width(cfg.n);
    }
    return 600.0;
}

/// Default placement for a lone compacton: the grid node nearest three
/// support widths in, so that the analytic peak stays on a node.
inline double default_center(const ExperimentConfig& cfg) {
    return std::round(3.0 * support_width(cfg.n) / cfg.dx) * cfg.dx;
}

/// Parses "5/3", "1.25" or "2" into a real number.
inline std::optional<double> parse_ratio(std::string_view text) {
    auto number = [](std::string_view s) -> std::optional<double> {
        s = kv::detail::trim(s);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
        return v;
    };
    const std::size_t slash = text.find('/');
    if (slash == std::string_view::npos) return number(text);
    const auto num = number(text.substr(0, slash));
    const auto den = number(text.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
}

inline std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::to_string(v);
}

inline void validate(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw ValidationError(msg); };
    if (!(cfg.n > 1.0 && cfg.n <= 3.0)) fail("n must satisfy 1 < n <= 3");
    if (cfg.compactons.empty()) fail("at least one compacton is required");
    if (cfg.scenario == Scenario::one_compacton && cfg.compactons.size() != 1) {
        fail("one-compacton scenario takes exactly one compacton");
    }
    if (cfg.scenario != Scenario::one_compacton && cfg.compactons.size() < 2) {
        fail(std::string(to_string(cfg.scenario)) + " scenario needs at least two compactons");
    }
    for (const auto& c : cfg.compactons) {
        if (!(c.c > 0.0) || !std::isfinite(c.c)) fail("compacton velocity c must be positive");
    }
    if (!(cfg.dx > 0.0)) fail("dx must be positive");
    if (!(cfg.dt > 0.0)) fail("dt must be positive");
    if (!(cfg.T > 0.0)) fail("T must be positive");
    if (!(cfg.alpha4 >= 0.0)) fail("alpha4 must be non-negative");
    if (!std::isfinite(cfg.c0)) fail("c0 must be finite");
    if (!(cfg.L > 0.0)) fail("L must be positive");
    if (cfg.L / cfg.dx < 5.0) fail("grid needs at least 5 nodes (L/dx >= 5)");
    if (cfg.diagnostics_stride == 0) fail("diagnostics_stride must be at least 1");
    if (!(cfg.newton_tol > 0.0)) fail("newton_tol must be positive");
    if (cfg.newton_max < 1) fail("newton_max must be at least 1");
    if (!(cfg.blowup_factor > 1.0)) fail("blowup_factor must exceed 1");
    for (double t : cfg.snapshot_times) {
        if (!(t >= 0.0 && t <= cfg.T)) fail("snapshot time " + format_number(t) + " outside [0, T]");
    }

    const double h = support_halfwidth(cfg.n);
    for (const auto& c : cfg.compactons) {
        if (c.x_center - h < 0.0 || c.x_center + h > cfg.L) {
            fail("compacton support at x_center = " + format_number(c.x_center) + " does not fit inside [0, L]");
        }
    }
    for (std::size_t i = 0; i < cfg.compactons.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.compactons.size(); ++j) {
            if (std::abs(cfg.compactons[i].x_center - cfg.compactons[j].x_center) < 2.0 * h) {
                fail("compacton supports overlap at t = 0");
            }
        }
    }
}

inline ExperimentConfig parse_config(std::string_view text) {
    const kv::Document doc = kv::parse(text);
    static const std::set<std::string> known{
        "scenario", "n", "compactons", "c0", "alpha4", "alpha2_mode", "L", "dx", "dt", "T", "snapshot_times",
        "diagnostics_stride", "output_dir", "newton_tol", "newton_max", "blowup_factor"};
    for (const auto& [key, value] : doc) {
        if (known.count(key) == 0) throw ParseError("unknown key", value.line, key);
    }

    auto number = [&](const std::string& key) -> std::optional<double> {
        const auto it = doc.find(key);
        if (it == doc.end()) return std::nullopt;
        if (!it->second.is_number()) throw ParseError("expected a number", it->second.line, key);
        return it->second.number();
    };
    auto string = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = doc.find(key);
        if (it == doc.end()) return std::nullopt;
        if (!it->second.is_string()) throw ParseError("expected a string", it->second.line, key);
        return it->second.string();
    };

    ExperimentConfig cfg;
    if (const auto s = string("scenario")) {
        if (*s == "one-compacton") cfg.scenario = Scenario::one_compacton;
        else if (*s == "collision") cfg.scenario = Scenario::collision;
        else if (*s == "long-run") cfg.scenario = Scenario::long_run;
        else throw ParseError("scenario must be one-compacton, collision or long-run", doc.at("scenario").line, "scenario");
    }

    const auto n_it = doc.find("n");
    if (n_it == doc.end()) throw ParseError("missing required key", 0, "n");
    if (n_it->second.is_number()) {
        cfg.n = n_it->second.number();
        cfg.n_text = format_number(cfg.n);
    } else if (n_it->second.is_string()) {
        const auto v = parse_ratio(n_it->second.string());
        if (!v) throw ParseError("expected a number or a ratio like \"5/3\"", n_it->second.line, "n");
        cfg.n = *v;
        cfg.n_text = n_it->second.string();
    } else {
        throw ParseError("expected a number or a ratio like \"5/3\"", n_it->second.line, "n");
    }

    if (const auto v = number("c0")) cfg.c0 = *v;
    if (const auto v = number("alpha4")) cfg.alpha4 = *v;
    if (const auto v = number("dx")) cfg.dx = *v;
    if (const auto v = number("dt")) cfg.dt = *v;
    if (const auto v = number("T")) cfg.T = *v;
    if (const auto v = number("newton_tol")) cfg.newton_tol = *v;
    if (const auto v = number("blowup_factor")) cfg.blowup_factor = *v;
    if (const auto v = number("newton_max")) {
        if (*v != std::floor(*v)) throw ParseError("expected an integer", doc.at("newton_max").line, "newton_max");
        cfg.newton_max = static_cast<int>(*v);
    }
    if (const auto v = number("diagnostics_stride")) {
        if (*v != std::floor(*v) || *v < 0) {
            throw ParseError("expected a non-negative integer", doc.at("diagnostics_stride").line, "diagnostics_stride");
        }
        cfg.diagnostics_stride = static_cast<std::size_t>(*v);
    }
    if (const auto s = string("output_dir")) cfg.output_dir = *s;

    if (const auto s = string("alpha2_mode")) {
        const int line = doc.at("alpha2_mode").line;
        if (*s == "zero") {
            cfg.alpha2_mode = Alpha2Mode::zero;
        } else if (*s == "auto") {
            cfg.alpha2_mode = Alpha2Mode::automatic;
        } else if (s->rfind("explicit(", 0) == 0 && s->back() == ')') {
            const auto v = parse_ratio(std::string_view(*s).substr(9, s->size() - 10));
            if (!v) throw ParseError("explicit(...) needs a number", line, "alpha2_mode");
            cfg.alpha2_mode = Alpha2Mode::explicit_value;
            cfg.alpha2_explicit = *v;
        } else {
            throw ParseError("alpha2_mode must be \"zero\", \"auto\" or \"explicit(<value>)\"", line, "alpha2_mode");
        }
    }

    if (const auto it = doc.find("snapshot_times"); it != doc.end()) {
        if (!it->second.is_array()) throw ParseError("expected an array of numbers", it->second.line, "snapshot_times");
        for (const auto& v : it->second.array()) {
            if (!v.is_number()) throw ParseError("expected an array of numbers", v.line, "snapshot_times");
            cfg.snapshot_times.push_back(v.number());
        }
    }

    const bool explicit_compactons = doc.count("compactons") != 0;
    if (explicit_compactons) {
        const auto& arr = doc.at("compactons");
        if (!arr.is_array()) throw ParseError("expected an array of [c, x_center] pairs", arr.line, "compactons");
        for (const auto& item : arr.array()) {
            if (!item.is_array() || item.array().size() != 2 || !item.array()[0].is_number() ||
                !item.array()[1].is_number()) {
                throw ParseError("each compacton must be a [c, x_center] pair", item.line, "compactons");
            }
            cfg.compactons.push_back({cfg.n, item.array()[0].number(), item.array()[1].number()});
        }
    } else if (cfg.scenario == Scenario::one_compacton) {
        if (!(cfg.n > 1.0 && cfg.n <= 3.0)) throw ValidationError("n must satisfy 1 < n <= 3");
        cfg.compactons.push_back({cfg.n, 1.0, default_center(cfg)});
    }

    if (const auto v = number("L")) {
        cfg.L = *v;
    } else {
        if (!(cfg.n > 1.0 && cfg.n <= 3.0)) throw ValidationError("n must satisfy 1 < n <= 3");
        cfg.L = default_domain_length(cfg);
    }

    validate(cfg);
    return cfg;
}

} // namespace compacton
