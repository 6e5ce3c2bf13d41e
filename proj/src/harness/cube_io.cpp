#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "isac/harness.hpp"

namespace isac {

namespace {

constexpr char kMagic[8] = {'O', 'F', 'D', 'M', 'C', 'U', 'B', 'E'};
constexpr std::size_t kHeaderBytes = 8 + 2 + 3 * 4 + 2 * 8;
constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 31;

template <class T>
void put_le(std::string& out, T value) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <class T>
T get_le(std::string_view in, std::size_t offset) {
    using U = std::conditional_t<sizeof(T) == 2, std::uint16_t,
                                 std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        bits |= static_cast<U>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    return std::bit_cast<T>(bits);
}

[[noreturn]] void fail(const std::string& what, std::size_t offset) {
    throw IoError(what + " at offset " + std::to_string(offset));
}

}  // namespace

std::string encode_cube(const RadarCube& cube, double df, double fc) {
    const auto nr = cube.rx_antennas(), n = cube.subcarriers(), m = cube.symbols();
    if (nr > std::numeric_limits<std::uint32_t>::max() || n > std::numeric_limits<std::uint32_t>::max() ||
        m > std::numeric_limits<std::uint32_t>::max())
        throw IoError("cube dimensions exceed the file format limits");
    std::string out(kMagic, sizeof kMagic);
    out.reserve(kHeaderBytes + nr * n * m * 8);
    put_le<std::uint16_t>(out, 1);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(nr));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m));
    put_le<double>(out, df);
    put_le<double>(out, fc);
    for (const auto& a : cube.antennas) {
        for (auto v : a.flat()) {
            put_le<float>(out, static_cast<float>(v.real()));
            put_le<float>(out, static_cast<float>(v.imag()));
        }
    }
    return out;
}

void export_cube(const std::filesystem::path& path, const RadarCube& cube, double df, double fc) {
    const std::string bytes = encode_cube(cube, df, fc);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open cube file " + path.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed for cube file " + path.string());
}

IngestedCube decode_cube(std::string_view in) {
    if (in.size() < sizeof kMagic || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0)
        fail("not a cube file (bad magic)", 0);
    if (in.size() < kHeaderBytes) fail("truncated header", in.size());

    IngestedCube res;
    auto& meta = res.meta;
    meta.version = get_le<std::uint16_t>(in, 8);
    if (meta.version != 1) fail("unsupported cube version " + std::to_string(meta.version), 8);
    meta.rx_antennas = get_le<std::uint32_t>(in, 10);
    meta.subcarriers = get_le<std::uint32_t>(in, 14);
    meta.symbols = get_le<std::uint32_t>(in, 18);
    meta.subcarrier_spacing_hz = get_le<double>(in, 22);
    meta.carrier_hz = get_le<double>(in, 30);

    const std::uint64_t samples =
        std::uint64_t{meta.rx_antennas} * meta.subcarriers * meta.symbols;
    if (meta.rx_antennas == 0 || meta.subcarriers == 0 || meta.symbols == 0)
        fail("zero cube dimension", 10);
    if (samples > kMaxSamples || meta.rx_antennas > kMaxSamples || meta.subcarriers > kMaxSamples ||
        meta.symbols > kMaxSamples)
        fail("cube dimensions overflow the sample limit", 10);
    const std::uint64_t need = kHeaderBytes + samples * 8;
    if (in.size() < need) fail("truncated payload", in.size());
    if (in.size() > need) fail("trailing bytes after payload", need);

    auto& cube = res.cube;
    cube.antennas.assign(meta.rx_antennas, CMatrix(meta.subcarriers, meta.symbols));
    std::size_t off = kHeaderBytes;
    for (auto& a : cube.antennas) {
        for (auto& v : a.flat()) {
            const float re = get_le<float>(in, off), im = get_le<float>(in, off + 4);
            v = {re, im};
            off += 8;
        }
    }
    return res;
}

IngestedCube ingest_cube(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open cube file " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    const std::string bytes = buf.str();
    try {
        return decode_cube(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

}  // namespace isac
