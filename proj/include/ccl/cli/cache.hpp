#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "ccl/solver.hpp"

namespace ccl::cli {

struct CachedResult {
    std::string payload;  // exact bytes on disk
    GroundStateResult result;
};

/// One JSON file per (exponent, N, gradient tolerance, code version). The tolerance enters the
/// file name through its IEEE-754 bit pattern, so distinct tolerances never share an entry.
/// Unreadable or corrupt entries are reported through `warn` and treated as misses.
class FileCache final : public GroundStateCache {
public:
    using WarningSink = std::function<void(const std::string&)>;

    explicit FileCache(std::filesystem::path dir, WarningSink warn = {});

    const std::filesystem::path& directory() const { return dir_; }
    std::filesystem::path entry_path(int exponent, int n, double gradient_tolerance) const;

    std::optional<CachedResult> lookup_entry(int exponent, int n, double gradient_tolerance) const;

    std::optional<GroundStateResult> lookup(int exponent, int n, double gradient_tolerance) override;
    /// Atomic; throws IoError on failure.
    void store(int exponent, int n, double gradient_tolerance, const GroundStateResult& result) override;

private:
    std::filesystem::path dir_;
    WarningSink warn_;
};

}  // namespace ccl::cli
