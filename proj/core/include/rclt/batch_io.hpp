#ifndef RCLT_BATCH_IO_HPP
#define RCLT_BATCH_IO_HPP

#include <iosfwd>
#include <string>

#include "rclt/process.hpp"

namespace rclt {

// Binary batch format: 64-byte header of eight little-endian u64 fields
// (magic "RCLT", version, n, p, N, seed, spec_digest, reserved) followed by
// N*n*p little-endian f64 values, replicate-major then time then coordinate.
inline constexpr std::uint64_t kBatchMagic = 0x544c4352ull;  // "RCLT"
inline constexpr std::uint64_t kBatchVersion = 1;

void write_batch_binary(const SampleBatch& batch, const std::string& path);
SampleBatch read_batch_binary(const std::string& path);

void write_batch_csv(const SampleBatch& batch, std::ostream& os);
void write_batch_csv(const SampleBatch& batch, const std::string& path);

}  // namespace rclt

#endif
