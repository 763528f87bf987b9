#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lsm {

// Thrown when a config or input file violates an invariant. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
    ValidationError(const std::string& msg, std::vector<std::string> detail)
        : std::runtime_error(msg), details(std::move(detail)) {}
    std::vector<std::string> details;
};

// Thrown when a solver or decomposition fails. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// FNV-1a, used for run ids and geometry hashes.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 1469598103934665603ULL);

std::string to_hex(std::uint64_t v);

// Runs fn(i) for i in [0, n). Each index must write only its own output slot;
// results are then independent of scheduling. threads <= 1 runs inline.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

// Writes via a temp file in the same directory, then renames over the target.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

} // namespace lsm
