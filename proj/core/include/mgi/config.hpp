#ifndef MGI_CONFIG_HPP
#define MGI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mgi/types.hpp"

namespace mgi {

// Flat plain-text configuration: one `key = value` per line, UTF-8,
// '#' starts a comment. Unknown keys are rejected via restrict_keys.
class KeyValueConfig {
  public:
    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);

    // Throws ConfigError if the file mentions a key outside `allowed`.
    void restrict_keys(const std::set<std::string>& allowed) const;

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint64(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

  private:
    std::map<std::string, std::string> entries_;
};

// Comma-separated list of reals (e.g. a lambda sweep).
std::vector<double> parse_double_list(const std::string& text);

}  // namespace mgi

#endif
