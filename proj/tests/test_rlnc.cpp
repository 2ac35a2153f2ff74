#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "p2pcast/rlnc.hpp"
#include "support.hpp"

using namespace p2pcast;

TEST_CASE("field multiplication matches bitwise reduction exhaustively") {
  for (int a = 0; a < 256; ++a)
    for (int b = 0; b < 256; ++b)
      REQUIRE(gf256::mul(a, b) ==
              testsupport::gf_mul_slow(static_cast<std::uint8_t>(a),
                                       static_cast<std::uint8_t>(b)));
}

TEST_CASE("field axioms") {
  CHECK(gf256::mul(0x53, 0xCA) == 0x01);
  for (int a = 0; a < 256; ++a) {
    CHECK(gf256::mul(static_cast<gf256::Elem>(a), 1) == a);
    CHECK(gf256::mul(static_cast<gf256::Elem>(a), 0) == 0);
  }
  for (int a = 1; a < 256; ++a)
    CHECK(gf256::mul(static_cast<gf256::Elem>(a),
                     gf256::inv(static_cast<gf256::Elem>(a))) == 1);
  CHECK_THROWS_AS(gf256::inv(0), std::domain_error);

  // distributivity over XOR on random triples
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto a = static_cast<gf256::Elem>(rng.next_below(256));
    const auto b = static_cast<gf256::Elem>(rng.next_below(256));
    const auto c = static_cast<gf256::Elem>(rng.next_below(256));
    CHECK(gf256::mul(a, gf256::add(b, c)) ==
          gf256::add(gf256::mul(a, b), gf256::mul(a, c)));
  }
}

TEST_CASE("single-packet generation with unit coefficient is the identity") {
  const Payload p{1, 2, 3, 250};
  const CodedPacket out = encode_with({1}, {p});
  CHECK(out.payload == p);
  CHECK(out.coeffs == std::vector<gf256::Elem>{1});
}

TEST_CASE("encode emits the stated linear combination, deterministically") {
  const std::vector<Payload> sources{{0x12, 0x34, 0x56}, {0xab, 0xcd, 0xef}};
  Rng rng(77);
  const CodedPacket a = encode(sources, rng);
  Rng rng2(77);
  const CodedPacket b = encode(sources, rng2);
  CHECK(a.coeffs == b.coeffs);
  CHECK(a.payload == b.payload);

  for (std::size_t k = 0; k < sources.front().size(); ++k) {
    const gf256::Elem expect =
        gf256::add(testsupport::gf_mul_slow(a.coeffs[0], sources[0][k]),
                   testsupport::gf_mul_slow(a.coeffs[1], sources[1][k]));
    CHECK(a.payload[k] == expect);
  }

  CHECK_THROWS_AS(encode({{1, 2}, {1}}, rng), std::invalid_argument);
  CHECK_THROWS_AS(encode_with({1}, {{1, 2}, {3, 4}}), std::invalid_argument);
}

TEST_CASE("independent coefficient draws are distinct") {
  const std::vector<Payload> sources(16, Payload(8, 0x5a));
  Rng rng(99);
  std::vector<std::vector<gf256::Elem>> seen;
  for (int i = 0; i < 16; ++i) seen.push_back(encode(sources, rng).coeffs);
  for (std::size_t i = 0; i < seen.size(); ++i)
    for (std::size_t j = i + 1; j < seen.size(); ++j)
      CHECK(seen[i] != seen[j]);
}

TEST_CASE("decode round trip for generations up to 8") {
  Rng seed_rng(1234);
  for (int g = 1; g <= 8; ++g) {
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<Payload> sources;
      for (int i = 0; i < g; ++i) {
        Payload p(16);
        for (auto& x : p)
          x = static_cast<gf256::Elem>(seed_rng.next_below(256));
        sources.push_back(std::move(p));
      }
      Rng rng(seed_rng.next_u64());
      // keep drawing until the generation is decodable, then expect equality
      for (;;) {
        std::vector<CodedPacket> packets;
        for (int i = 0; i < g; ++i) packets.push_back(encode(sources, rng));
        const DecodeResult res = decode(packets);
        if (!res.ok()) continue;
        REQUIRE(*res.payloads == sources);
        break;
      }
    }
  }
}

TEST_CASE("duplicated packet cannot decode a two-packet generation") {
  const std::vector<Payload> sources{{1, 2, 3, 4}, {5, 6, 7, 8}};
  Rng rng(3);
  const CodedPacket p = encode(sources, rng);
  const DecodeResult res = decode({p, p});
  CHECK_FALSE(res.ok());
  CHECK(res.rank == 1);
}

TEST_CASE("full-rank probability at generation size 16") {
  const int g = 16;
  std::vector<Payload> sources;
  for (int i = 0; i < g; ++i) sources.push_back(Payload(4, gf256::Elem(i)));
  Rng rng(20240601);
  int full_rank = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<CodedPacket> packets;
    for (int i = 0; i < g; ++i) packets.push_back(encode(sources, rng));
    const DecodeResult res = decode(packets);
    if (res.ok()) {
      ++full_rank;
      CHECK(*res.payloads == sources);
    }
  }
  // random GF(256) matrices are nonsingular with probability ~0.9961
  CHECK(full_rank >= 990);
}

TEST_CASE("recoding closure") {
  const std::vector<Payload> sources{{9, 8, 7}, {6, 5, 4}, {3, 2, 1}};
  Rng rng(11);
  std::vector<CodedPacket> coded;
  for (int i = 0; i < 3; ++i) coded.push_back(encode(sources, rng));

  const CodedPacket mixed = recode(coded, rng);
  // the recoded payload must equal the combination its header claims
  const CodedPacket direct = encode_with(mixed.coeffs, sources);
  CHECK(mixed.payload == direct.payload);
}

TEST_CASE("dimension mismatches are rejected") {
  CodedPacket a{{1, 2}, {1, 1, 1}};
  CodedPacket b{{1}, {1, 1, 1}};
  CodedPacket c{{1, 2}, {1, 1}};
  CHECK_THROWS_AS(decode({a, b}), std::invalid_argument);
  CHECK_THROWS_AS(decode({a, c}), std::invalid_argument);
  CHECK_THROWS_AS(decode({}), std::invalid_argument);
  Rng rng(1);
  CHECK_THROWS_AS(recode({a, b}, rng), std::invalid_argument);
}

TEST_CASE("wire layout golden bytes") {
  const CodedPacket p{{0x01, 0xfe}, {0xde, 0xad, 0xbe, 0xef}};
  const std::vector<std::uint8_t> expected{0x00, 0x02, 0x00, 0x04, 0x01,
                                           0xfe, 0xde, 0xad, 0xbe, 0xef};
  CHECK(serialize_packet(p) == expected);

  const CodedPacket back = deserialize_packet(expected);
  CHECK(back.coeffs == p.coeffs);
  CHECK(back.payload == p.payload);
  CHECK_THROWS_AS(deserialize_packet({0, 1, 0}), std::invalid_argument);
  CHECK_THROWS_AS(deserialize_packet({0, 2, 0, 4, 1}), std::invalid_argument);
}
