#include "mgi/config.hpp"

#include <fstream>
#include <sstream>

namespace mgi {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config: empty key on line " +
                                           std::to_string(lineno));
        if (cfg.entries_.count(key))
            throw ConfigError("config: duplicate key " + key);
        cfg.entries_[key] = value;
    }
    return cfg;
}

void KeyValueConfig::restrict_keys(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : entries_)
        if (!allowed.count(key)) throw ConfigError("config: unknown key " + key);
}

bool KeyValueConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("config: missing key " + key);
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

int KeyValueConfig::get_int(const std::string& key) const {
    try {
        size_t pos = 0;
        const std::string v = get_string(key);
        const int out = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::logic_error&) {
        throw ConfigError("config: key " + key + " is not an integer");
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key) const {
    try {
        size_t pos = 0;
        const std::string v = get_string(key);
        const double out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::logic_error&) {
        throw ConfigError("config: key " + key + " is not a real number");
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::uint64_t KeyValueConfig::get_uint64(const std::string& key) const {
    try {
        size_t pos = 0;
        const std::string v = get_string(key);
        const std::uint64_t out = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::logic_error&) {
        throw ConfigError("config: key " + key + " is not an unsigned integer");
    }
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        try {
            size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw ConfigError("parse_double_list: bad entry `" + item + "`");
        }
    }
    return out;
}

}  // namespace mgi
