#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace damrl {

/// Flat `key = value` configuration file. Lines starting with '#' and blank
/// lines are ignored. Keys keep insertion order so serialization is stable.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse_string(std::string_view text);
    static KeyValueConfig parse_file(const std::string& path);

    bool has(const std::string& key) const;

    /// Throw std::out_of_range when the key is missing, std::invalid_argument
    /// when the value does not parse as the requested type.
    std::string get_string(const std::string& key) const;
    double get_real(const std::string& key) const;
    long get_int(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_real(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;

    void set(const std::string& key, const std::string& value);
    void set_real(const std::string& key, double value);
    void set_int(const std::string& key, long value);

    std::string serialize() const;
    void write_file(const std::string& path) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

} // namespace damrl
