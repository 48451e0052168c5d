#include "ccl/cli/cache.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <iostream>

#include "ccl/cli/serialize.hpp"

namespace ccl::cli {

FileCache::FileCache(std::filesystem::path dir, WarningSink warn) : dir_(std::move(dir)), warn_(std::move(warn)) {
    if (!warn_) warn_ = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
}

std::filesystem::path FileCache::entry_path(int exponent, int n, double gradient_tolerance) const {
    char bits[17];
    std::snprintf(bits, sizeof bits, "%016llx",
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(gradient_tolerance)));
    return dir_ / ("gs-p" + std::to_string(exponent) + "-n" + std::to_string(n) + "-tol" + bits + "-" +
                   kCodeVersion + ".json");
}

std::optional<CachedResult> FileCache::lookup_entry(int exponent, int n, double gradient_tolerance) const {
    const auto path = entry_path(exponent, n, gradient_tolerance);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    try {
        std::string payload = read_file(path);
        const Json j = Json::parse(payload);
        if (j.at("code_version").get<std::string>() != kCodeVersion ||
            j.at("potential").at("exponent").get<int>() != exponent || j.at("N").get<int>() != n) {
            throw FormatError("entry key does not match its file name");
        }
        GroundStateResult r = ground_state_from_json(j);
        if (!r.converged || r.gradient_max_norm > gradient_tolerance) throw FormatError("entry is not converged");
        return CachedResult{std::move(payload), std::move(r)};
    } catch (const std::exception& e) {
        warn_("ignoring corrupt cache entry " + path.string() + ": " + e.what());
        return std::nullopt;
    }
}

std::optional<GroundStateResult> FileCache::lookup(int exponent, int n, double gradient_tolerance) {
    auto hit = lookup_entry(exponent, n, gradient_tolerance);
    if (!hit) return std::nullopt;
    return std::move(hit->result);
}

void FileCache::store(int exponent, int n, double gradient_tolerance, const GroundStateResult& result) {
    if (result.chain.size() != static_cast<std::size_t>(n)) throw IoError("cache store: N does not match the chain");
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
    write_file_atomic(entry_path(exponent, n, gradient_tolerance), dump_json(to_json(result, exponent)));
}

}  // namespace ccl::cli
