#include "rankstat/cache.hpp"

#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <limits>
#include <system_error>

namespace rankstat::cache {

namespace {

constexpr unsigned char kMagic[4] = {'R', 'K', 'S', 'T'};

void put_le(std::vector<unsigned char>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::uint32_t payload_crc(const unsigned char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed the payload in bounded pieces.
  while (size > 0) {
    const std::size_t step = std::min<std::size_t>(size, std::numeric_limits<uInt>::max());
    crc = crc32(crc, data, static_cast<uInt>(step));
    data += step;
    size -= step;
  }
  return static_cast<std::uint32_t>(crc);
}

const char* kind_name(TableKind kind) { return kind == TableKind::Primes ? "primes" : "spf"; }

}  // namespace

std::vector<unsigned char> encode(TableKind kind, std::uint32_t x, const std::vector<std::uint32_t>& entries,
                                  std::uint16_t version) {
  std::vector<unsigned char> payload;
  payload.reserve(entries.size() * 4);
  for (std::uint32_t e : entries) put_le(payload, e, 4);
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  put_le(out, version, 2);
  put_le(out, static_cast<std::uint16_t>(kind), 2);
  put_le(out, x, 4);
  put_le(out, payload_crc(payload.data(), payload.size()), 4);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::optional<std::vector<std::uint32_t>> decode(const std::vector<unsigned char>& bytes, TableKind kind,
                                                 std::uint32_t x) {
  if (bytes.size() < kHeaderSize || (bytes.size() - kHeaderSize) % 4 != 0) return std::nullopt;
  if (!std::equal(kMagic, kMagic + 4, bytes.begin())) return std::nullopt;
  const unsigned char* h = bytes.data();
  if (get_le(h + 4, 2) != kFormatVersion) return std::nullopt;
  if (get_le(h + 6, 2) != static_cast<std::uint16_t>(kind)) return std::nullopt;
  if (get_le(h + 8, 4) != x) return std::nullopt;
  const unsigned char* payload = h + kHeaderSize;
  const std::size_t size = bytes.size() - kHeaderSize;
  if (get_le(h + 12, 4) != payload_crc(payload, size)) return std::nullopt;
  std::vector<std::uint32_t> out(size / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint32_t>(get_le(payload + 4 * i, 4));
  return out;
}

std::filesystem::path Cache::path_for(TableKind kind, std::uint64_t x) const {
  return dir_ / (std::string(kind_name(kind)) + "-" + std::to_string(x) + ".bin");
}

std::optional<std::vector<std::uint32_t>> Cache::load(TableKind kind, std::uint64_t x) const {
  if (x > std::numeric_limits<std::uint32_t>::max()) return std::nullopt;
  std::ifstream in(path_for(kind, x), std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode(bytes, kind, static_cast<std::uint32_t>(x));
}

bool Cache::store(TableKind kind, std::uint64_t x, const std::vector<std::uint32_t>& entries) {
  if (x > std::numeric_limits<std::uint32_t>::max()) return false;
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  const auto target = path_for(kind, x);
  auto tmp = target;
  tmp += ".tmp";
  const auto bytes = encode(kind, static_cast<std::uint32_t>(x), entries);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      warnings_.push_back("cache: could not write " + tmp.string());
      return false;
    }
  }
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    warnings_.push_back("cache: could not rename into " + target.string() + ": " + ec.message());
    std::filesystem::remove(tmp, ec);
    return false;
  }
  return true;
}

stats::PrimeTable load_or_build(Cache* cache, std::uint64_t x, std::uint64_t spf_cap) {
  const std::uint64_t spf_n = spf_cap > 0 ? std::min(x, spf_cap) : 0;
  std::optional<std::vector<std::uint32_t>> primes, spf;
  if (cache) {
    primes = cache->load(TableKind::Primes, x);
    if (spf_cap > 0) spf = cache->load(TableKind::SmallestPrimeFactor, spf_n);
  }
  if (primes && (spf_cap == 0 || spf)) {
    return stats::PrimeTable(x, std::move(*primes), spf ? std::move(*spf) : std::vector<std::uint32_t>{});
  }
  stats::PrimeTable built = stats::sieve_primes(x, spf_cap);
  if (cache) {
    if (!primes) cache->store(TableKind::Primes, x, {built.primes().begin(), built.primes().end()});
    if (spf_cap > 0 && !spf) cache->store(TableKind::SmallestPrimeFactor, spf_n, {built.spf().begin(), built.spf().end()});
  }
  return built;
}

}  // namespace rankstat::cache
