#include "rclt/batch_io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

namespace rclt {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char buf[8];
    is.read(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    put_u64(os, bits);
}

double get_f64(std::istream& is) {
    const std::uint64_t bits = get_u64(is);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

}  // namespace

void write_batch_binary(const SampleBatch& batch, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    put_u64(os, kBatchMagic);
    put_u64(os, kBatchVersion);
    put_u64(os, static_cast<std::uint64_t>(batch.n));
    put_u64(os, static_cast<std::uint64_t>(batch.p));
    put_u64(os, static_cast<std::uint64_t>(batch.N));
    put_u64(os, batch.seed);
    put_u64(os, batch.spec_digest);
    put_u64(os, 0);  // reserved
    for (double d : batch.data) put_f64(os, d);
    if (!os) throw IoError("write failed: " + path);
}

SampleBatch read_batch_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    if (get_u64(is) != kBatchMagic) throw IoError("bad magic in " + path);
    if (get_u64(is) != kBatchVersion) throw IoError("unsupported version in " + path);
    SampleBatch batch;
    batch.n = static_cast<int>(get_u64(is));
    batch.p = static_cast<int>(get_u64(is));
    batch.N = static_cast<std::int64_t>(get_u64(is));
    batch.seed = get_u64(is);
    batch.spec_digest = get_u64(is);
    get_u64(is);  // reserved
    if (!is || batch.n < 1 || batch.p < 1 || batch.N < 1) throw IoError("corrupt header in " + path);
    batch.data.resize(static_cast<std::size_t>(batch.N) * batch.n * batch.p);
    for (double& d : batch.data) d = get_f64(is);
    if (!is) throw IoError("truncated data in " + path);
    return batch;
}

void write_batch_csv(const SampleBatch& batch, std::ostream& os) {
    os << "replicate,time,coord,value\n";
    char buf[64];
    for (std::int64_t r = 0; r < batch.N; ++r)
        for (int t = 0; t < batch.n; ++t)
            for (int c = 0; c < batch.p; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", batch.at(r, t, c));
                os << r << ',' << (t + 1) << ',' << (c + 1) << ',' << buf << '\n';
            }
}

void write_batch_csv(const SampleBatch& batch, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    write_batch_csv(batch, os);
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace rclt
