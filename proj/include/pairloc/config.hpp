#pragma once

// Line-oriented experiment configuration: UTF-8 `key = value` pairs with
// `#` comments and dotted section keys (`noise.kind = random_flip`).

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pairloc/errors.hpp"

namespace pairloc {

class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::filesystem::path& path);
    static KeyValueConfig parse_string(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
    // Comma- or whitespace-separated scalar lists.
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<int> get_int_list(const std::string& key) const;

    // Keys present in the file but never read; used to reject typos.
    std::vector<std::string> unused_keys() const;

    // FNV-1a over the raw file bytes; stamped into every output header.
    std::uint64_t content_hash() const { return hash_; }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> touched_;
    std::uint64_t hash_ = 0;
};

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace pairloc
