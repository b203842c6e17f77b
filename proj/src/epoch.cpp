#include "sef/epoch.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace sef {

void EpochConfig::validate() const
{
    if (k == 0)
        throw ConfigError("epoch length k must be >= 1");
    if (s == 0)
        throw ConfigError("droplets per epoch s must be >= 1");
    if (superblock_size && *superblock_size == 0)
        throw ConfigError("super-block size must be positive");
}

std::vector<SuperBlockSpan> plan_superblocks(std::span<const Header> headers,
                                             std::optional<std::uint64_t> superblock_size)
{
    std::vector<SuperBlockSpan> spans;
    for (std::uint64_t i = 0; i < headers.size(); ++i) {
        const std::uint64_t size = kHeaderSize + headers[i].payload_size;
        if (!superblock_size) {
            spans.push_back({i, 1, size});
            continue;
        }
        if (size > *superblock_size)
            throw ConfigError("block " + std::to_string(i) + " (" + std::to_string(size) +
                              " bytes) exceeds the super-block size " +
                              std::to_string(*superblock_size));
        if (spans.empty() || spans.back().size + size > *superblock_size)
            spans.push_back({i, 0, 0});
        spans.back().count += 1;
        spans.back().size += size;
    }
    return spans;
}

std::vector<SuperBlock> concatenate_blocks(std::span<const Block> blocks,
                                           std::optional<std::uint64_t> superblock_size)
{
    std::vector<Header> headers;
    headers.reserve(blocks.size());
    for (const Block& b : blocks)
        headers.push_back(b.header);

    std::vector<SuperBlock> out;
    for (const SuperBlockSpan& span : plan_superblocks(headers, superblock_size)) {
        SuperBlock sb;
        sb.first_block = span.first_block;
        sb.bytes.reserve(span.size);
        for (std::uint64_t i = span.first_block; i < span.first_block + span.count; ++i) {
            const Bytes raw = blocks[i].serialize();
            sb.bytes.insert(sb.bytes.end(), raw.begin(), raw.end());
            sb.headers.push_back(blocks[i].header);
        }
        out.push_back(std::move(sb));
    }
    return out;
}

// ---------------------------------------------------------------------------

EpochLayout::EpochLayout(std::shared_ptr<const Chain> chain, EpochConfig cfg)
    : chain_(std::move(chain)), cfg_(cfg)
{
    cfg_.validate();
    const auto headers = chain_->headers();
    spans_ = plan_superblocks(headers, cfg_.superblock_size);
    sealed_ = count_sealed(cfg_.k);
}

EpochLayout::EpochLayout(const Chain& chain, EpochConfig cfg)
    : EpochLayout(std::make_shared<const Chain>(chain), cfg)
{
}

std::size_t EpochLayout::count_sealed(std::uint32_t k) const
{
    const std::uint64_t height = chain_->height();
    std::size_t sealed = 0;
    for (;;) {
        const std::uint64_t last = (static_cast<std::uint64_t>(sealed) + 1) * k - 1;
        if (last >= spans_.size())
            break;
        // With concatenation the final super-block may still be filling.
        if (cfg_.superblock_size && last + 1 == spans_.size())
            break;
        const SuperBlockSpan& span = spans_[last];
        if (height - (span.first_block + span.count) < cfg_.tau)
            break;
        ++sealed;
    }
    return sealed;
}

std::size_t EpochLayout::sealed_epochs(std::uint32_t k_override) const
{
    return count_sealed(k_override);
}

std::uint64_t EpochLayout::tail_start() const
{
    if (sealed_ == 0)
        return 0;
    const SuperBlockSpan& span = spans_[sealed_ * cfg_.k - 1];
    return span.first_block + span.count;
}

EpochView EpochLayout::view(std::uint32_t epoch, std::uint32_t k) const
{
    const std::uint64_t first = static_cast<std::uint64_t>(epoch) * k;
    if (first + k > spans_.size())
        throw ConfigError("epoch " + std::to_string(epoch) + " extends past the chain");
    EpochView v;
    v.epoch = epoch;
    v.super_blocks.reserve(k);
    v.headers.reserve(k);
    for (std::uint64_t j = first; j < first + k; ++j) {
        const SuperBlockSpan& span = spans_[j];
        Bytes bytes;
        bytes.reserve(span.size);
        HeaderGroup group;
        for (std::uint64_t i = span.first_block; i < span.first_block + span.count; ++i) {
            const Block& b = chain_->blocks[i];
            const Bytes raw = b.serialize();
            bytes.insert(bytes.end(), raw.begin(), raw.end());
            group.push_back(b.header);
        }
        v.super_blocks.push_back(std::move(bytes));
        v.headers.push_back(std::move(group));
    }
    return v;
}

std::vector<HeaderGroup> EpochLayout::header_groups(std::uint32_t epoch, std::uint32_t k) const
{
    const std::uint64_t first = static_cast<std::uint64_t>(epoch) * k;
    if (first + k > spans_.size())
        throw ConfigError("epoch " + std::to_string(epoch) + " extends past the chain");
    std::vector<HeaderGroup> groups;
    groups.reserve(k);
    for (std::uint64_t j = first; j < first + k; ++j) {
        HeaderGroup group;
        for (std::uint64_t i = spans_[j].first_block; i < spans_[j].first_block + spans_[j].count; ++i)
            group.push_back(chain_->blocks[i].header);
        groups.push_back(std::move(group));
    }
    return groups;
}

std::uint64_t EpochLayout::epoch_bytes(std::uint32_t epoch, std::uint32_t k) const
{
    const std::uint64_t first = static_cast<std::uint64_t>(epoch) * k;
    std::uint64_t total = 0;
    for (std::uint64_t j = first; j < first + k && j < spans_.size(); ++j)
        total += spans_[j].size;
    return total;
}

// ---------------------------------------------------------------------------

std::vector<NeighborVector> plan_droplets(std::uint64_t seed, std::uint32_t k, std::uint32_t s,
                                          const DegreePmf& pmf)
{
    std::vector<NeighborVector> plan;
    plan.reserve(s);
    for (std::uint32_t j = 0; j < s; ++j) {
        Rng rng(derive_seed(seed, k, j));
        plan.push_back(sample_neighbors(k, pmf, rng));
    }
    return plan;
}

bool operator==(const NodeStore& a, const NodeStore& b)
{
    auto headers_equal = [](const auto& x, const auto& y) {
        if (!x || !y)
            return !x && !y;
        return *x == *y;
    };
    auto epochs_equal = [](const StoredEpoch& x, const StoredEpoch& y) {
        return x.index == y.index && x.k == y.k && x.first_superblock == y.first_superblock &&
               x.covered_bytes == y.covered_bytes && x.droplets == y.droplets;
    };
    return a.node_id == b.node_id && a.seed == b.seed && a.cfg.k == b.cfg.k && a.cfg.s == b.cfg.s &&
           a.cfg.tau == b.cfg.tau && a.cfg.superblock_size == b.cfg.superblock_size &&
           a.soliton.c == b.soliton.c && a.soliton.delta == b.soliton.delta &&
           a.next_epoch == b.next_epoch &&
           std::equal(a.epochs.begin(), a.epochs.end(), b.epochs.begin(), b.epochs.end(), epochs_equal) &&
           headers_equal(a.header_chain, b.header_chain) && a.tail == b.tail;
}

NodeStore make_node_store(std::uint64_t node_id, std::uint64_t seed, const EpochConfig& cfg,
                          const SolitonParams& soliton)
{
    cfg.validate();
    NodeStore store;
    store.node_id = node_id;
    store.seed = seed;
    store.cfg = cfg;
    store.soliton = soliton;
    store.soliton.k = cfg.k;
    store.header_chain = std::make_shared<const std::vector<Header>>();
    return store;
}

namespace {

void refresh_chain_state(NodeStore& store, const EpochLayout& layout, std::uint64_t tail_start)
{
    const Chain& chain = layout.chain();
    if (!store.header_chain || store.header_chain->size() != chain.height())
        store.header_chain = std::make_shared<const std::vector<Header>>(chain.headers());
    store.tail.assign(chain.blocks.begin() + static_cast<std::ptrdiff_t>(tail_start), chain.blocks.end());
}

} // namespace

void seal_epoch(NodeStore& store, const EpochLayout& layout, const DegreePmf& pmf)
{
    const EpochConfig& cfg = layout.config();
    if (cfg.k != store.cfg.k || cfg.superblock_size != store.cfg.superblock_size)
        throw ConfigError("node store and chain layout disagree on the epoch configuration");
    if (pmf.k() != cfg.k)
        throw ConfigError("degree distribution support does not match k");
    const std::uint32_t epoch = store.next_epoch;
    if (epoch >= layout.sealed_epochs())
        throw NotFinalizedError("epoch " + std::to_string(epoch) + " is not yet " +
                                std::to_string(cfg.tau) + " blocks deep");

    const EpochView view = layout.view(epoch);
    StoredEpoch stored;
    stored.index = epoch;
    stored.k = cfg.k;
    stored.first_superblock = static_cast<std::uint64_t>(epoch) * cfg.k;
    stored.covered_bytes = layout.epoch_bytes(epoch);
    for (NeighborVector& nv : plan_droplets(store.seed, cfg.k, store.cfg.s, pmf))
        stored.droplets.push_back(make_droplet(view, std::move(nv)));
    store.epochs.push_back(std::move(stored));
    store.next_epoch = epoch + 1;

    const SuperBlockSpan& last = layout.spans()[(static_cast<std::uint64_t>(epoch) + 1) * cfg.k - 1];
    refresh_chain_state(store, layout, last.first_block + last.count);
}

void seal_epoch(NodeStore& store, const Chain& chain, const EpochConfig& cfg, const DegreePmf& pmf)
{
    seal_epoch(store, EpochLayout(chain, cfg), pmf);
}

std::size_t seal_all(NodeStore& store, const EpochLayout& layout, const DegreePmf& pmf)
{
    std::size_t n = 0;
    while (store.next_epoch < layout.sealed_epochs()) {
        seal_epoch(store, layout, pmf);
        ++n;
    }
    if (n == 0)
        refresh_chain_state(store, layout, layout.tail_start());
    return n;
}

void reencode_tier(NodeStore& store, const EpochLayout& layout, std::uint32_t long_epoch,
                   TierParams small, TierParams big, const DegreePmf& big_pmf,
                   const SmallEpochDecoder& decode_fn)
{
    if (small.k == 0 || small.s == 0 || big.k == 0 || big.s == 0)
        throw ConfigError("tier parameters must be positive");
    if (big.k % small.k != 0)
        throw ConfigError("long epoch length must be a multiple of the small epoch length");
    if (big_pmf.k() != big.k)
        throw ConfigError("degree distribution support does not match the long epoch length");
    if (long_epoch >= layout.sealed_epochs(big.k))
        throw NotFinalizedError("long epoch " + std::to_string(long_epoch) + " is not sealed");

    const std::uint32_t ratio = big.k / small.k;
    const std::uint32_t first_small = long_epoch * ratio;
    const std::vector<HeaderGroup> groups = layout.header_groups(long_epoch, big.k);

    EpochView view;
    view.epoch = long_epoch;
    view.headers = groups;
    for (std::uint32_t l = first_small; l < first_small + ratio; ++l) {
        std::vector<Bytes> blocks = decode_fn(l);
        if (blocks.size() != small.k)
            throw InsufficientDroplets("small epoch " + std::to_string(l) + " decoded to " +
                                       std::to_string(blocks.size()) + " super-blocks");
        for (auto& b : blocks) {
            const std::size_t slot = view.super_blocks.size();
            if (verify_singleton(b, groups[slot]) != Verdict::accept)
                throw IntegrityError("decoded super-block " + std::to_string(slot) +
                                     " fails header verification");
            view.super_blocks.push_back(std::move(b));
        }
    }

    StoredEpoch stored;
    stored.index = long_epoch;
    stored.k = big.k;
    stored.first_superblock = static_cast<std::uint64_t>(long_epoch) * big.k;
    stored.covered_bytes = layout.epoch_bytes(long_epoch, big.k);
    for (NeighborVector& nv : plan_droplets(store.seed, big.k, big.s, big_pmf))
        stored.droplets.push_back(make_droplet(view, std::move(nv)));

    std::erase_if(store.epochs, [&](const StoredEpoch& e) {
        return e.k == small.k && e.index >= first_small && e.index < first_small + ratio;
    });
    store.epochs.push_back(std::move(stored));
    std::sort(store.epochs.begin(), store.epochs.end(),
              [](const StoredEpoch& a, const StoredEpoch& b) { return a.first_superblock < b.first_superblock; });
    store.next_epoch = std::max(store.next_epoch, first_small + ratio);
}

StorageSavings storage_savings(const NodeStore& store)
{
    StorageSavings out;
    std::uint64_t vector_bytes = 0;
    for (const StoredEpoch& e : store.epochs) {
        out.sealed_chain_bytes += e.covered_bytes;
        for (const Droplet& d : e.droplets) {
            out.droplet_bytes += d.data.size();
            vector_bytes += d.neighbors.bytes().size();
        }
    }
    std::uint64_t tail_bytes = 0;
    for (const Block& b : store.tail)
        tail_bytes += b.serialized_size();
    const std::uint64_t header_bytes = store.header_chain ? store.header_chain->size() * kHeaderSize : 0;
    out.stored_bytes = out.droplet_bytes + vector_bytes + header_bytes + tail_bytes;
    if (out.droplet_bytes > 0)
        out.gamma = static_cast<double>(out.sealed_chain_bytes) / static_cast<double>(out.droplet_bytes);
    if (out.stored_bytes > 0)
        out.gamma_inclusive = static_cast<double>(out.sealed_chain_bytes + tail_bytes) /
                              static_cast<double>(out.stored_bytes);
    return out;
}

// ---------------------------------------------------------------------------
// Snapshots

Bytes encode_node_store(const NodeStore& store, const std::string& provenance_json)
{
    using nlohmann::json;
    json manifest;
    manifest["format"] = "sef-node-store";
    manifest["version"] = 1;
    manifest["node_id"] = store.node_id;
    manifest["seed"] = store.seed;
    manifest["cfg"] = {{"k", store.cfg.k},
                       {"s", store.cfg.s},
                       {"tau", store.cfg.tau},
                       {"superblock_size", store.cfg.superblock_size ? json(*store.cfg.superblock_size)
                                                                     : json(nullptr)}};
    manifest["soliton"] = {{"c", store.soliton.c}, {"delta", store.soliton.delta}};
    manifest["next_epoch"] = store.next_epoch;
    json epochs = json::array();
    for (const StoredEpoch& e : store.epochs)
        epochs.push_back({{"index", e.index},
                          {"k", e.k},
                          {"first_superblock", e.first_superblock},
                          {"covered_bytes", e.covered_bytes},
                          {"droplets", e.droplets.size()}});
    manifest["epochs"] = std::move(epochs);
    manifest["headers"] = store.header_chain ? store.header_chain->size() : 0;
    manifest["tail_blocks"] = store.tail.size();
    manifest["provenance"] = json::parse(provenance_json);

    const std::string text = manifest.dump();
    Bytes out(text.begin(), text.end());
    out.push_back('\n');
    for (const StoredEpoch& e : store.epochs)
        for (const Droplet& d : e.droplets)
            d.write(out);
    if (store.header_chain)
        for (const Header& h : *store.header_chain) {
            const auto raw = h.serialize();
            out.insert(out.end(), raw.begin(), raw.end());
        }
    for (const Block& b : store.tail) {
        const Bytes raw = b.serialize();
        out.insert(out.end(), raw.begin(), raw.end());
    }
    return out;
}

NodeStore decode_node_store(ByteView bytes)
{
    using nlohmann::json;
    const auto newline = std::find(bytes.begin(), bytes.end(), std::uint8_t{'\n'});
    if (newline == bytes.end())
        throw ParseError("node store snapshot has no manifest line");
    json manifest;
    try {
        manifest = json::parse(bytes.begin(), newline);
        if (manifest.at("format") != "sef-node-store" || manifest.at("version") != 1)
            throw ParseError("unsupported node store snapshot");

        NodeStore store;
        store.node_id = manifest.at("node_id").get<std::uint64_t>();
        store.seed = manifest.at("seed").get<std::uint64_t>();
        const json& cfg = manifest.at("cfg");
        store.cfg.k = cfg.at("k").get<std::uint32_t>();
        store.cfg.s = cfg.at("s").get<std::uint32_t>();
        store.cfg.tau = cfg.at("tau").get<std::uint64_t>();
        if (!cfg.at("superblock_size").is_null())
            store.cfg.superblock_size = cfg.at("superblock_size").get<std::uint64_t>();
        store.soliton.k = store.cfg.k;
        store.soliton.c = manifest.at("soliton").at("c").get<double>();
        store.soliton.delta = manifest.at("soliton").at("delta").get<double>();
        store.next_epoch = manifest.at("next_epoch").get<std::uint32_t>();

        Reader r(bytes.subspan(static_cast<std::size_t>(newline - bytes.begin()) + 1));
        for (const json& e : manifest.at("epochs")) {
            StoredEpoch stored;
            stored.index = e.at("index").get<std::uint32_t>();
            stored.k = e.at("k").get<std::uint32_t>();
            stored.first_superblock = e.at("first_superblock").get<std::uint64_t>();
            stored.covered_bytes = e.at("covered_bytes").get<std::uint64_t>();
            const auto n = e.at("droplets").get<std::size_t>();
            for (std::size_t i = 0; i < n; ++i)
                stored.droplets.push_back(Droplet::read(r));
            store.epochs.push_back(std::move(stored));
        }
        const auto n_headers = manifest.at("headers").get<std::size_t>();
        if (n_headers > r.remaining() / kHeaderSize)
            throw ParseError("header count exceeds snapshot size");
        std::vector<Header> headers;
        headers.reserve(n_headers);
        for (std::size_t i = 0; i < n_headers; ++i)
            headers.push_back(Header::parse(r.take(kHeaderSize)));
        if (!validate_header_chain(headers))
            throw IntegrityError("snapshot header-chain linkage is broken");
        store.header_chain = std::make_shared<const std::vector<Header>>(std::move(headers));

        const auto n_tail = manifest.at("tail_blocks").get<std::size_t>();
        for (std::size_t i = 0; i < n_tail; ++i) {
            Block b;
            b.header = Header::parse(r.take(kHeaderSize));
            b.txs = Block::parse_payload(r.take(b.header.payload_size));
            if (b.txs.empty() || merkle_root(b.txs) != b.header.merkle_root)
                throw IntegrityError("snapshot tail block " + std::to_string(i) + " fails Merkle check");
            store.tail.push_back(std::move(b));
        }
        if (!r.done())
            throw ParseError("trailing bytes in node store snapshot");
        return store;
    } catch (const json::exception& e) {
        throw ParseError(std::string("node store manifest: ") + e.what());
    }
}

void save_node_store(const NodeStore& store, const std::string& path, const std::string& provenance_json)
{
    write_file(path, encode_node_store(store, provenance_json));
}

NodeStore load_node_store(const std::string& path)
{
    return decode_node_store(read_file(path));
}

} // namespace sef
