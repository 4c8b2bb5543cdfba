#pragma once

#include "skytile/index.hpp"

#include <array>
#include <memory>
#include <optional>

namespace skytile {

using Bytes = std::vector<std::uint8_t>;

// Keyed PRF. Abstract so tests can drop in a cheap double; the default is
// HMAC-SHA256.
class Prf {
public:
    virtual ~Prf() = default;
    virtual std::array<std::uint8_t, 32> eval(std::span<const std::uint8_t> data) const = 0;
};

class HmacPrf final : public Prf {
public:
    explicit HmacPrf(Bytes key) : key_(std::move(key)) {}
    std::array<std::uint8_t, 32> eval(std::span<const std::uint8_t> data) const override;

private:
    Bytes key_;
};

// Authenticated cipher for leaf and boundary-table payloads. Default is
// AES-256-GCM; blob layout is nonce(12) || ciphertext || tag(16).
class Aead {
public:
    virtual ~Aead() = default;
    virtual Bytes seal(std::span<const std::uint8_t> plaintext,
                       std::span<const std::uint8_t> ad, std::uint64_t seq) const = 0;
    virtual std::optional<Bytes> open(std::span<const std::uint8_t> blob,
                                      std::span<const std::uint8_t> ad) const = 0;
};

class AesGcmAead final : public Aead {
public:
    explicit AesGcmAead(Bytes key);
    Bytes seal(std::span<const std::uint8_t> plaintext, std::span<const std::uint8_t> ad,
               std::uint64_t seq) const override;
    std::optional<Bytes> open(std::span<const std::uint8_t> blob,
                              std::span<const std::uint8_t> ad) const override;

private:
    Bytes key_;
};

// --- order-revealing encryption (bitwise, leaks first differing bit) -------

// Plaintexts are biased to unsigned with u = v + inf; 42 bits cover the
// closed domain [-inf, inf] plus the slab-end sentinel inf+1.
inline constexpr int kOreBits = 42;

struct OreCiphertext {
    std::array<std::uint8_t, kOreBits> digits{};  // mod-3, MSB first

    bool operator==(const OreCiphertext&) const = default;
};

struct OreComparison {
    int order = 0;       // -1, 0, +1
    int first_diff = -1;  // MSB-first index of the first differing bit
};

OreCiphertext ore_encrypt(Coord value, const Prf& prf, Coord inf);
OreComparison ore_compare(const OreCiphertext& a, const OreCiphertext& b);

// --- order-preserving dictionary (static mOPE) ------------------------------

// Order-dense dictionary over every comparison coordinate of every index.
// The index is bulk-loaded and immutable, so the mutable mOPE protocol
// reduces to this one-time mapping the user downloads.
struct OpeDictionary {
    std::vector<std::vector<Coord>> values;  // per dim, sorted unique

    // Dense rank of a dictionary value (0-based). Throws if absent.
    std::uint64_t rank(int dim, Coord v) const;
    // Wire encoding: dictionary values 2r+1, query values the even slots in
    // between, so order and equality survive encoding exactly.
    std::uint64_t encode_value(int dim, Coord v) const;
    std::uint64_t encode_query(int dim, Coord v) const;

    Bytes serialize() const;
    static OpeDictionary deserialize(std::span<const std::uint8_t> bytes);
};

OpeDictionary build_ope_dictionary(std::span<const SkyIndex> idxs);

// --- encrypted index --------------------------------------------------------

enum class SecureMode : std::uint8_t { kPlain = 0, kMope = 1, kPore = 2 };

struct SecretKeys {
    Bytes master;  // 32 bytes

    static SecretKeys from_seed(std::uint64_t seed);
    Bytes subkey(std::string_view label, std::uint64_t a = 0, std::uint64_t b = 0,
                 std::uint64_t c = 0) const;
};

struct EncNode {
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t payload = -1;
    std::vector<std::uint64_t> mope_chain;
    std::vector<OreCiphertext> pore_chain;

    bool is_leaf() const { return left < 0; }
};

struct EncSideEntry {
    std::uint64_t mope_key = 0;
    OreCiphertext pore_key;
    Bytes blob;
};

struct EncIndex {
    SecureMode mode = SecureMode::kMope;
    int dim = 0;
    int height = 0;
    std::vector<EncNode> nodes;  // preorder
    std::vector<Bytes> leaf_blobs;
    std::vector<std::uint32_t> leaf_point_counts;  // stored (padded) counts
    std::vector<std::vector<EncSideEntry>> side;   // per dim, ascending key order
};

struct EncIndexSet {
    SecureMode mode = SecureMode::kMope;
    bool padded = false;
    int dim = 0;
    Coord inf = kDefaultInf;
    std::uint64_t l = 0;
    std::int64_t k = 0;
    std::vector<EncIndex> indexes;
};

// DO-side: encrypt bulk-loaded plaintext indexes. Leaf payloads carry the
// actual point coordinates; with pad_leaves every leaf blob of an index has
// the same byte length.
EncIndexSet encrypt_indexes(std::span<const SkyIndex> idxs, const Dataset& D,
                            const SecretKeys& keys, SecureMode mode, bool pad_leaves,
                            std::uint64_t l, std::int64_t k);

struct EncQuery {
    SecureMode mode = SecureMode::kMope;
    std::vector<std::uint64_t> mope_ranks;                 // per dim
    std::vector<std::vector<OreCiphertext>> pore_levels;   // [level][dim]
    std::vector<OreCiphertext> pore_side;                  // per dim
};

// mOPE path: needs the dictionary; keys unused. pORE path: needs the keys;
// one independent encryption per (level, dim) plus one per dim for the
// boundary tables.
EncQuery encode_query(const OpeDictionary* dict, const SecretKeys* keys, const Query& q,
                      const EncIndexSet& set, size_t index_ordinal);

struct EncResult {
    struct SideBlob {
        int dim = 0;
        std::uint32_t pos = 0;
        Bytes blob;
    };
    SkyIndex::Path path;
    Bytes leaf_blob;
    std::vector<SideBlob> side_blobs;
};

// SP-side: pure comparisons on order-encoded values; returns opaque blobs.
EncResult enc_lookup(const EncIndex& eidx, const EncQuery& eq);

// User-side: authenticated decryption, boundary correction, local filter.
// Throws on tampered blobs.
std::vector<Point> decrypt_candidates(const SecretKeys& keys, const EncIndexSet& set,
                                      size_t index_ordinal, const Query& q,
                                      const EncResult& res);

// Full user query against every index of the family: encode, look up,
// decrypt, union, filter.
std::vector<Point> secure_query(const OpeDictionary* dict, const SecretKeys& keys,
                                const EncIndexSet& set, const Query& q);

// --- leakage ----------------------------------------------------------------

struct LeakageReport {
    std::uint64_t index_count = 0;
    struct PerIndex {
        int height = 0;
        std::vector<std::uint32_t> node_content_sizes;  // preorder; 0 for internal

        bool operator==(const PerIndex&) const = default;
    };
    std::vector<PerIndex> indexes;

    bool operator==(const LeakageReport&) const = default;
};

LeakageReport leakage_report(const EncIndexSet& set);

// Serialization of the encrypted structure with every ciphertext field
// zeroed (lengths kept): what the SP's disk layout reveals beyond the
// ciphertext bytes themselves.
Bytes structural_digest(const EncIndexSet& set);

Bytes serialize_enc_indexes(const EncIndexSet& set);
EncIndexSet deserialize_enc_indexes(std::span<const std::uint8_t> bytes);

}  // namespace skytile
