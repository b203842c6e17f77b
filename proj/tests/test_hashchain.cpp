#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <numeric>

#include "helpers.hpp"
#include "sef/hashchain.hpp"

using namespace sef;

namespace {

Bytes str_bytes(const std::string& s)
{
    return Bytes(s.begin(), s.end());
}

Digest join_hash(const Digest& a, const Digest& b)
{
    Bytes cat(a.bytes.begin(), a.bytes.end());
    cat.insert(cat.end(), b.bytes.begin(), b.bytes.end());
    return hash(cat);
}

std::string tmp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("sef_test_" + name)).string();
}

} // namespace

TEST_CASE("sha256 known vectors", "[hashchain]")
{
    CHECK(hash(Bytes{}).hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(hash(str_bytes("abc")).hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("sha256 of a 1 MiB buffer matches a second implementation", "[hashchain]")
{
    Bytes buf(1 << 20);
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = static_cast<std::uint8_t>((i * 31 + 7) & 0xFF);
    // Python hashlib over the same buffer.
    CHECK(hash(buf).hex() == "06b7bbfb7824aa03382051691630eb26de85102d1b08a81e907ec0744cd8a286");
}

TEST_CASE("digest hex round trip", "[hashchain]")
{
    const Digest d = hash(str_bytes("x"));
    CHECK(Digest::from_hex(d.hex()) == d);
    CHECK(Digest::zero().is_zero());
    CHECK_FALSE(d.is_zero());
    CHECK_THROWS_AS(Digest::from_hex("abc"), ParseError);
    CHECK_THROWS_AS(Digest::from_hex(std::string(64, 'z')), ParseError);
}

TEST_CASE("merkle root", "[hashchain]")
{
    const Bytes t0 = str_bytes("tx0"), t1 = str_bytes("tx1"), t2 = str_bytes("tx2");

    SECTION("single leaf is its hash")
    {
        const std::vector<Bytes> txs{t0};
        CHECK(merkle_root(txs) == hash(t0));
    }
    SECTION("two leaves")
    {
        const std::vector<Bytes> txs{t0, t1};
        CHECK(merkle_root(txs) == join_hash(hash(t0), hash(t1)));
        CHECK(merkle_root(txs).hex() == "9db4d4c69f3d7236f4de569987d746845d8d85250703351226c5a3cdaf1f66ea");
    }
    SECTION("odd level duplicates the last node")
    {
        const std::vector<Bytes> txs{t0, t1, t2};
        const Digest expect = join_hash(join_hash(hash(t0), hash(t1)), join_hash(hash(t2), hash(t2)));
        CHECK(merkle_root(txs) == expect);
        CHECK(merkle_root(txs).hex() == "726da7d399987671da491c4886e07dacd532fb6e7e48862732701d2443e3b532");
    }
    SECTION("empty list")
    {
        CHECK_THROWS_AS(merkle_root(std::vector<Bytes>{}), EmptyPayload);
    }
}

TEST_CASE("header and block serialization", "[hashchain]")
{
    const Block b = make_block({str_bytes("hello"), str_bytes("world!")}, Digest::zero());
    CHECK(b.header.payload_size == 4 + 4 + 5 + 4 + 6);
    CHECK(b.serialize_payload().size() == b.header.payload_size);
    CHECK(b.serialize().size() == b.serialized_size());
    CHECK(b.header.merkle_root == merkle_root(b.txs));

    const auto raw = b.header.serialize();
    CHECK(raw.size() == kHeaderSize);
    CHECK(Header::parse(raw) == b.header);
    CHECK(b.header.digest() == hash(raw));
    CHECK_THROWS_AS(Header::parse(ByteView(raw).first(kHeaderSize - 1)), ParseError);

    CHECK(Block::parse_payload(b.serialize_payload()) == b.txs);
    Bytes extra = b.serialize_payload();
    extra.push_back(0);
    CHECK_THROWS_AS(Block::parse_payload(extra), ParseError);
}

TEST_CASE("header chain validation", "[hashchain]")
{
    const Chain chain = test::fixed_chain(10, 64);
    const auto headers = chain.headers();
    CHECK(validate_header_chain(headers));
    CHECK(chain.blocks[0].header.prev_header_hash.is_zero());

    auto broken = headers;
    broken[4].merkle_root.bytes[0] ^= 1;
    CHECK_FALSE(validate_header_chain(broken));

    std::vector<std::vector<Header>> candidates{
        std::vector<Header>(headers.begin(), headers.begin() + 6), broken, headers,
        std::vector<Header>(headers.begin(), headers.begin() + 9)};
    CHECK(longest_valid_header_chain(candidates) == headers);

    std::vector<std::vector<Header>> bad{broken};
    CHECK_THROWS_AS(longest_valid_header_chain(bad), NoValidChain);
}

TEST_CASE("generated chains hold their invariants", "[hashchain]")
{
    ChainGenConfig g;
    g.n_blocks = 50;
    g.size_model = UniformSize{40, 900};
    g.max_block_size = 1000;
    g.rng_seed = 3;
    const Chain chain = generate_chain(g);
    REQUIRE(chain.height() == 50);
    CHECK_NOTHROW(check_chain_integrity(chain));
    for (const Block& b : chain.blocks) {
        CHECK(b.serialize_payload().size() == b.header.payload_size);
        CHECK(b.header.payload_size >= 40);
        CHECK(b.header.payload_size <= 900);
    }
    CHECK(generate_chain(g) == chain);
    g.rng_seed = 4;
    CHECK_FALSE(generate_chain(g) == chain);

    g.size_model = UniformSize{40, 2000};
    CHECK_THROWS_AS(generate_chain(g), ConfigError);
    g.size_model = FixedSize{3};
    CHECK_THROWS_AS(generate_chain(g), ConfigError);
}

TEST_CASE("empirical histogram sizes match the histogram mean", "[hashchain]")
{
    const EmpiricalSize h = EmpiricalSize::parse("# lo hi weight\n100 200 1\n1000, 3000, 3\n\n");
    REQUIRE(h.bins.size() == 2);
    CHECK(h.mean() == Catch::Approx((150.0 * 1 + 2000.0 * 3) / 4));

    ChainGenConfig g;
    g.n_blocks = 4000;
    g.size_model = h;
    g.rng_seed = 9;
    const Chain chain = generate_chain(g);
    double sum = 0;
    for (const Block& b : chain.blocks)
        sum += static_cast<double>(b.header.payload_size);
    CHECK(sum / 4000 == Catch::Approx(h.mean()).epsilon(0.05));

    CHECK_THROWS_AS(EmpiricalSize::parse("1 2\n"), ConfigError);
    CHECK_THROWS_AS(EmpiricalSize::parse("5 2 1\n"), ConfigError);
}

TEST_CASE("bitcoin-like histogram file loads", "[hashchain]")
{
    const EmpiricalSize h = EmpiricalSize::load(std::string(SEF_DATA_DIR) + "/bitcoin_like_sizes.txt");
    CHECK(h.bins.size() >= 4);
    CHECK(h.mean() > 0);
}

TEST_CASE("block-dump files round trip", "[hashchain]")
{
    const Chain chain = test::fixed_chain(100, 200);
    const std::string path = tmp_path("chain.bin");
    store_chain(chain, path);
    CHECK(load_chain(path) == chain);
    std::remove(path.c_str());

    const Bytes raw = encode_chain(chain);
    CHECK(decode_chain(raw) == chain);

    SECTION("truncation")
    {
        CHECK_THROWS_AS(decode_chain(ByteView(raw).first(raw.size() - 1)), ParseError);
        CHECK_THROWS_AS(decode_chain(ByteView(raw).first(5)), ParseError);
    }
    SECTION("trailing bytes")
    {
        Bytes more = raw;
        more.push_back(0);
        CHECK_THROWS_AS(decode_chain(more), ParseError);
    }
    SECTION("bad magic")
    {
        Bytes bad = raw;
        bad[0] = 'X';
        CHECK_THROWS_AS(decode_chain(bad), ParseError);
    }
    SECTION("tampered payload")
    {
        Bytes bad = raw;
        bad.back() ^= 1;
        CHECK_THROWS_AS(decode_chain(bad), IntegrityError);
    }
    SECTION("tampered link")
    {
        Bytes bad = raw;
        // prev_header_hash of block 1 starts 32 bytes into its header.
        const std::size_t offset = 8 + 2 + 8 + chain.blocks[0].serialized_size() + 32;
        bad[offset] ^= 1;
        CHECK_THROWS_AS(decode_chain(bad), IntegrityError);
    }
    SECTION("missing file")
    {
        CHECK_THROWS_AS(load_chain(tmp_path("does_not_exist")), IoError);
    }
}
