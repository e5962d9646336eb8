#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mext/errors.hpp"

namespace mext {

struct UnknownKey : ConfigError      { using ConfigError::ConfigError; };
struct TypeMismatch : ConfigError    { using ConfigError::ConfigError; };
struct MissingRequired : ConfigError { using ConfigError::ConfigError; };

// Flat `key = value` configuration. `#` starts a comment (outside quotes),
// values may be wrapped in double quotes, reals accept the fraction form
// "1/8". Every key a command does not read is an error; the resolved echo
// lists keys in read order with defaults marked.
class Config {
public:
    static Config load(const std::string& path);
    // For tests and the built-in selftest fixtures.
    static Config from_string(const std::string& text, const std::string& label = "<memory>");

    std::string str(const std::string& key, const std::string& defaultValue);
    std::string str_required(const std::string& key);
    double real(const std::string& key, const std::string& defaultValue);
    double real_required(const std::string& key);
    std::int64_t integer(const std::string& key, const std::string& defaultValue);
    std::vector<double> reals(const std::string& key, const std::string& defaultValue);
    std::vector<double> reals_required(const std::string& key);
    std::vector<std::int64_t> integers(const std::string& key, const std::string& defaultValue);

    bool has(const std::string& key) const;
    // 0 when the key was defaulted or absent.
    int line_of(const std::string& key) const;
    const std::string& source() const { return label_; }

    // Throws UnknownKey on the first entry no getter consumed.
    void reject_unknown() const;

    // `key = value` echo, one line per consumed key, `# default` markers on
    // values that did not come from the file. Stable byte-for-byte.
    std::string resolved_text(const std::string& command) const;
    void write_resolved(const std::string& path, const std::string& command) const;

    // Raises TypeMismatch pointing at the key's line; for semantic checks
    // (value parsed but out of range or malformed for its role).
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;

private:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
        bool consumed = false;
    };
    struct Resolved {
        std::string key;
        std::string value;
        bool isDefault = false;
    };

    Entry* find(const std::string& key);
    const Entry* find(const std::string& key) const;
    std::string consume(const std::string& key, const std::string* defaultValue);
    double parse_real(const std::string& key, const std::string& text) const;
    std::int64_t parse_integer(const std::string& key, const std::string& text) const;

    std::string label_;
    std::vector<Entry> entries_;
    std::vector<Resolved> resolved_;
};

} // namespace mext
