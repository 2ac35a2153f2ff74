#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "p2pcast/rng.hpp"

namespace p2pcast {

// GF(2^8) arithmetic with the reduction polynomial x^8 + x^4 + x^3 + x + 1.
// Addition is XOR; multiplication goes through log/exp tables.
namespace gf256 {

using Elem = std::uint8_t;

inline Elem add(Elem a, Elem b) { return a ^ b; }
Elem mul(Elem a, Elem b);
Elem inv(Elem a);  // throws on a == 0
Elem div(Elem a, Elem b);

}  // namespace gf256

// One coded packet: coefficient vector (length = generation size) plus the
// combined payload symbols.
struct CodedPacket {
  std::vector<gf256::Elem> coeffs;
  std::vector<gf256::Elem> payload;
};

using Payload = std::vector<gf256::Elem>;

// Linear combination with explicit coefficients; coeffs.size() must match the
// generation size.
CodedPacket encode_with(const std::vector<gf256::Elem>& coeffs,
                        const std::vector<Payload>& sources);

// Random linear combination of a whole generation.
CodedPacket encode(const std::vector<Payload>& sources, Rng& rng);

// Random recombination of already-coded packets; the output coefficient
// vector is the same combination applied to the input coefficient vectors.
CodedPacket recode(const std::vector<CodedPacket>& packets, Rng& rng);

struct DecodeResult {
  std::optional<std::vector<Payload>> payloads;  // set iff rank == G
  int rank = 0;
  bool ok() const { return payloads.has_value(); }
};

// Gaussian elimination over GF(2^8). Requires consistent dimensions; returns
// the achieved rank when the coefficient matrix is not full rank.
DecodeResult decode(const std::vector<CodedPacket>& packets);

// Wire layout: u16 BE generation size, u16 BE symbol count, coefficient
// bytes, payload bytes.
std::vector<std::uint8_t> serialize_packet(const CodedPacket& p);
CodedPacket deserialize_packet(const std::vector<std::uint8_t>& bytes);

}  // namespace p2pcast
