#include "damrl/common/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace damrl {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

KeyValueConfig KeyValueConfig::parse_string(std::string_view text) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
        cfg.set(std::string(key), std::string(value));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const {
    return index_.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
    const auto it = index_.find(key);
    if (it == index_.end()) throw std::out_of_range("missing config key: " + key);
    return entries_[it->second].second;
}

double KeyValueConfig::get_real(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t used = 0;
        const double r = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not a real number: " + v);
    }
}

long KeyValueConfig::get_int(const std::string& key) const {
    const std::string v = get_string(key);
    try {
        std::size_t used = 0;
        const long r = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not an integer: " + v);
    }
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_real(const std::string& key, double fallback) const {
    return has(key) ? get_real(key) : fallback;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    const auto it = index_.find(key);
    if (it != index_.end()) {
        entries_[it->second].second = value;
    } else {
        index_[key] = entries_.size();
        entries_.emplace_back(key, value);
    }
}

void KeyValueConfig::set_real(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    set(key, buf);
}

void KeyValueConfig::set_int(const std::string& key, long value) {
    set(key, std::to_string(value));
}

std::string KeyValueConfig::serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

void KeyValueConfig::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << serialize();
}

} // namespace damrl
