#include "mext/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace mext {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Comment starts at the first '#' with an even number of quotes before it.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

} // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config " + path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str(), path);
}

Config Config::from_string(const std::string& text, const std::string& label) {
    Config cfg;
    cfg.label_ = label;
    std::istringstream in(text);
    std::string raw;
    int lineNo = 0;
    while (std::getline(in, raw)) {
        ++lineNo;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineNo) +
                              ": expected `key = value`, got \"" + line + "\"");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key))
            throw ConfigError("config line " + std::to_string(lineNo) + ": malformed key \"" +
                              key + "\"");
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = trim(value.substr(1, value.size() - 2));
        if (value.empty())
            throw TypeMismatch("config line " + std::to_string(lineNo) + ": key '" + key +
                               "' has an empty value");
        if (const Entry* prev = cfg.find(key))
            throw ConfigError("config line " + std::to_string(lineNo) + ": key '" + key +
                              "' already set at line " + std::to_string(prev->line));
        cfg.entries_.push_back(Entry{key, value, lineNo, false});
    }
    return cfg;
}

Config::Entry* Config::find(const std::string& key) {
    for (Entry& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

const Config::Entry* Config::find(const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

bool Config::has(const std::string& key) const { return find(key) != nullptr; }

int Config::line_of(const std::string& key) const {
    const Entry* e = find(key);
    return e ? e->line : 0;
}

std::string Config::consume(const std::string& key, const std::string* defaultValue) {
    if (Entry* e = find(key)) {
        if (!e->consumed) {
            e->consumed = true;
            resolved_.push_back(Resolved{key, e->value, false});
        }
        return e->value;
    }
    if (!defaultValue)
        throw MissingRequired("config " + label_ + ": missing required key '" + key + "'");
    for (const Resolved& r : resolved_)
        if (r.key == key) return r.value;
    resolved_.push_back(Resolved{key, *defaultValue, true});
    return resolved_.back().value;
}

void Config::fail(const std::string& key, const std::string& what) const {
    const Entry* e = find(key);
    std::string where = e ? "config line " + std::to_string(e->line) : "config " + label_;
    throw TypeMismatch(where + ": key '" + key + "' " + what);
}

double Config::parse_real(const std::string& key, const std::string& text) const {
    std::size_t slash = text.find('/');
    if (slash != std::string::npos) {
        double num = parse_real(key, trim(text.substr(0, slash)));
        double den = parse_real(key, trim(text.substr(slash + 1)));
        if (den == 0.0) fail(key, "divides by zero in \"" + text + "\"");
        return num / den;
    }
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE)
        fail(key, "expects a real, got \"" + text + "\"");
    return v;
}

std::int64_t Config::parse_integer(const std::string& key, const std::string& text) const {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE)
        fail(key, "expects an integer, got \"" + text + "\"");
    return static_cast<std::int64_t>(v);
}

std::string Config::str(const std::string& key, const std::string& defaultValue) {
    return consume(key, &defaultValue);
}

std::string Config::str_required(const std::string& key) { return consume(key, nullptr); }

double Config::real(const std::string& key, const std::string& defaultValue) {
    return parse_real(key, consume(key, &defaultValue));
}

double Config::real_required(const std::string& key) {
    return parse_real(key, consume(key, nullptr));
}

std::int64_t Config::integer(const std::string& key, const std::string& defaultValue) {
    return parse_integer(key, consume(key, &defaultValue));
}

std::vector<double> Config::reals(const std::string& key, const std::string& defaultValue) {
    std::vector<std::string> toks = split_ws(consume(key, &defaultValue));
    if (toks.empty()) fail(key, "expects at least one real");
    std::vector<double> out;
    out.reserve(toks.size());
    for (const std::string& t : toks) out.push_back(parse_real(key, t));
    return out;
}

std::vector<double> Config::reals_required(const std::string& key) {
    std::vector<std::string> toks = split_ws(consume(key, nullptr));
    if (toks.empty()) fail(key, "expects at least one real");
    std::vector<double> out;
    out.reserve(toks.size());
    for (const std::string& t : toks) out.push_back(parse_real(key, t));
    return out;
}

std::vector<std::int64_t> Config::integers(const std::string& key,
                                           const std::string& defaultValue) {
    std::vector<std::string> toks = split_ws(consume(key, &defaultValue));
    if (toks.empty()) fail(key, "expects at least one integer");
    std::vector<std::int64_t> out;
    out.reserve(toks.size());
    for (const std::string& t : toks) out.push_back(parse_integer(key, t));
    return out;
}

void Config::reject_unknown() const {
    for (const Entry& e : entries_)
        if (!e.consumed)
            throw UnknownKey("config line " + std::to_string(e.line) + ": unknown key '" +
                             e.key + "'");
}

std::string Config::resolved_text(const std::string& command) const {
    std::string out = "# resolved configuration, command = " + command + "\n";
    for (const Resolved& r : resolved_) {
        out += r.key + " = " + r.value;
        if (r.isDefault) out += "   # default";
        out += "\n";
    }
    return out;
}

void Config::write_resolved(const std::string& path, const std::string& command) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << resolved_text(command);
}

} // namespace mext
