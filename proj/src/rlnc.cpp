#include "p2pcast/rlnc.hpp"

#include <array>
#include <stdexcept>

namespace p2pcast {
namespace gf256 {
namespace {

constexpr int kPoly = 0x11b;  // x^8 + x^4 + x^3 + x + 1

struct Tables {
  std::array<Elem, 256> exp{};
  std::array<int, 256> log{};
  Tables() {
    // 0x03 generates the multiplicative group under this polynomial.
    int x = 1;
    for (int i = 0; i < 255; ++i) {
      exp[i] = static_cast<Elem>(x);
      log[x] = i;
      x <<= 1;
      x ^= (x & 0x100) ? kPoly : 0;
      x ^= exp[i];  // x *= 3 == (x<<1) ^ x with reduction
    }
    exp[255] = exp[0];
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

Elem mul(Elem a, Elem b) {
  if (a == 0 || b == 0) return 0;
  const auto& t = tables();
  return t.exp[(t.log[a] + t.log[b]) % 255];
}

Elem inv(Elem a) {
  if (a == 0) throw std::domain_error("gf256: zero has no inverse");
  const auto& t = tables();
  return t.exp[(255 - t.log[a]) % 255];
}

Elem div(Elem a, Elem b) { return mul(a, inv(b)); }

}  // namespace gf256

namespace {

void check_sources(const std::vector<Payload>& sources) {
  if (sources.empty()) throw std::invalid_argument("empty generation");
  for (const auto& p : sources)
    if (p.size() != sources.front().size())
      throw std::invalid_argument("payload length mismatch");
}

}  // namespace

CodedPacket encode_with(const std::vector<gf256::Elem>& coeffs,
                        const std::vector<Payload>& sources) {
  check_sources(sources);
  if (coeffs.size() != sources.size())
    throw std::invalid_argument("coefficient count != generation size");
  CodedPacket out;
  out.coeffs = coeffs;
  out.payload.assign(sources.front().size(), 0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (coeffs[i] == 0) continue;
    for (std::size_t k = 0; k < out.payload.size(); ++k)
      out.payload[k] ^= gf256::mul(coeffs[i], sources[i][k]);
  }
  return out;
}

CodedPacket encode(const std::vector<Payload>& sources, Rng& rng) {
  check_sources(sources);
  std::vector<gf256::Elem> coeffs(sources.size());
  for (auto& c : coeffs) c = static_cast<gf256::Elem>(rng.next_below(256));
  return encode_with(coeffs, sources);
}

CodedPacket recode(const std::vector<CodedPacket>& packets, Rng& rng) {
  if (packets.empty()) throw std::invalid_argument("nothing to recode");
  const std::size_t g = packets.front().coeffs.size();
  const std::size_t s = packets.front().payload.size();
  for (const auto& p : packets)
    if (p.coeffs.size() != g || p.payload.size() != s)
      throw std::invalid_argument("inconsistent packet dimensions");

  CodedPacket out;
  out.coeffs.assign(g, 0);
  out.payload.assign(s, 0);
  for (const auto& p : packets) {
    const auto c = static_cast<gf256::Elem>(rng.next_below(256));
    if (c == 0) continue;
    for (std::size_t k = 0; k < g; ++k)
      out.coeffs[k] ^= gf256::mul(c, p.coeffs[k]);
    for (std::size_t k = 0; k < s; ++k)
      out.payload[k] ^= gf256::mul(c, p.payload[k]);
  }
  return out;
}

DecodeResult decode(const std::vector<CodedPacket>& packets) {
  if (packets.empty()) throw std::invalid_argument("no packets");
  const std::size_t g = packets.front().coeffs.size();
  const std::size_t s = packets.front().payload.size();
  for (const auto& p : packets)
    if (p.coeffs.size() != g || p.payload.size() != s)
      throw std::invalid_argument("inconsistent packet dimensions");

  // Augmented rows [coeffs | payload], reduced in place.
  std::vector<std::vector<gf256::Elem>> rows;
  rows.reserve(packets.size());
  for (const auto& p : packets) {
    std::vector<gf256::Elem> row = p.coeffs;
    row.insert(row.end(), p.payload.begin(), p.payload.end());
    rows.push_back(std::move(row));
  }

  int rank = 0;
  for (std::size_t col = 0; col < g && rank < static_cast<int>(rows.size());
       ++col) {
    std::size_t pivot = rows.size();
    for (std::size_t r = rank; r < rows.size(); ++r) {
      if (rows[r][col] != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const gf256::Elem lead = gf256::inv(rows[rank][col]);
    for (auto& x : rows[rank]) x = gf256::mul(x, lead);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == static_cast<std::size_t>(rank) || rows[r][col] == 0) continue;
      const gf256::Elem factor = rows[r][col];
      for (std::size_t k = col; k < rows[r].size(); ++k)
        rows[r][k] ^= gf256::mul(factor, rows[rank][k]);
    }
    ++rank;
  }

  DecodeResult res;
  res.rank = rank;
  if (rank < static_cast<int>(g)) return res;

  // Rows are now in reduced echelon form; reorder by pivot column.
  std::vector<Payload> payloads(g, Payload(s, 0));
  for (int r = 0; r < rank; ++r) {
    std::size_t col = 0;
    while (col < g && rows[r][col] == 0) ++col;
    for (std::size_t k = 0; k < s; ++k) payloads[col][k] = rows[r][g + k];
  }
  res.payloads = std::move(payloads);
  return res;
}

std::vector<std::uint8_t> serialize_packet(const CodedPacket& p) {
  const std::size_t g = p.coeffs.size();
  const std::size_t s = p.payload.size();
  if (g > 0xffff || s > 0xffff)
    throw std::invalid_argument("packet too large to serialize");
  std::vector<std::uint8_t> out;
  out.reserve(4 + g + s);
  out.push_back(static_cast<std::uint8_t>(g >> 8));
  out.push_back(static_cast<std::uint8_t>(g & 0xff));
  out.push_back(static_cast<std::uint8_t>(s >> 8));
  out.push_back(static_cast<std::uint8_t>(s & 0xff));
  out.insert(out.end(), p.coeffs.begin(), p.coeffs.end());
  out.insert(out.end(), p.payload.begin(), p.payload.end());
  return out;
}

CodedPacket deserialize_packet(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw std::invalid_argument("truncated packet");
  const std::size_t g = (bytes[0] << 8) | bytes[1];
  const std::size_t s = (bytes[2] << 8) | bytes[3];
  if (bytes.size() != 4 + g + s)
    throw std::invalid_argument("packet length mismatch");
  CodedPacket p;
  p.coeffs.assign(bytes.begin() + 4, bytes.begin() + 4 + g);
  p.payload.assign(bytes.begin() + 4 + g, bytes.end());
  return p;
}

}  // namespace p2pcast
