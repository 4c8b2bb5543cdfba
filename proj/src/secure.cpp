#include "skytile/secure.hpp"

#include "skytile/oracle.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <stdexcept>

namespace skytile {

namespace {

struct Writer {
    Bytes buf;
    template <typename T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        const size_t at = buf.size();
        buf.resize(at + sizeof(T));
        std::memcpy(buf.data() + at, &v, sizeof(T));
    }
    void put_bytes(std::span<const std::uint8_t> b) {
        put(static_cast<std::uint32_t>(b.size()));
        buf.insert(buf.end(), b.begin(), b.end());
    }
};

struct Reader {
    std::span<const std::uint8_t> buf;
    size_t at = 0;
    template <typename T>
    T get() {
        static_assert(std::is_trivially_copyable_v<T>);
        if (at + sizeof(T) > buf.size()) throw std::runtime_error("secure: blob truncated");
        T v;
        std::memcpy(&v, buf.data() + at, sizeof(T));
        at += sizeof(T);
        return v;
    }
    Bytes get_bytes() {
        const std::uint32_t n = get<std::uint32_t>();
        if (at + n > buf.size()) throw std::runtime_error("secure: blob truncated");
        Bytes b(buf.begin() + static_cast<std::ptrdiff_t>(at),
                buf.begin() + static_cast<std::ptrdiff_t>(at + n));
        at += n;
        return b;
    }
};

int chain_dim(int pos, int dim) { return pos < 2 * (dim - 1) ? pos / 2 : dim - 1; }

}  // namespace

std::array<std::uint8_t, 32> HmacPrf::eval(std::span<const std::uint8_t> data) const {
    std::array<std::uint8_t, 32> out{};
    unsigned int len = 0;
    HMAC(EVP_sha256(), key_.data(), static_cast<int>(key_.size()), data.data(), data.size(),
         out.data(), &len);
    return out;
}

AesGcmAead::AesGcmAead(Bytes key) : key_(std::move(key)) {
    if (key_.size() != 32) throw std::invalid_argument("AesGcmAead: key must be 32 bytes");
}

Bytes AesGcmAead::seal(std::span<const std::uint8_t> plaintext,
                       std::span<const std::uint8_t> ad, std::uint64_t seq) const {
    Bytes out(12 + plaintext.size() + 16);
    std::memcpy(out.data(), &seq, sizeof(seq));  // 12-byte nonce: seq || zeros
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    int outl = 0;
    bool ok = EVP_EncryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
              EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_IVLEN, 12, nullptr) == 1 &&
              EVP_EncryptInit_ex(ctx, nullptr, nullptr, key_.data(), out.data()) == 1;
    if (ok && !ad.empty())
        ok = EVP_EncryptUpdate(ctx, nullptr, &outl, ad.data(), static_cast<int>(ad.size())) == 1;
    if (ok && !plaintext.empty())
        ok = EVP_EncryptUpdate(ctx, out.data() + 12, &outl, plaintext.data(),
                               static_cast<int>(plaintext.size())) == 1;
    int fin = 0;
    if (ok) ok = EVP_EncryptFinal_ex(ctx, out.data() + 12 + outl, &fin) == 1;
    if (ok)
        ok = EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, 16,
                                 out.data() + 12 + plaintext.size()) == 1;
    EVP_CIPHER_CTX_free(ctx);
    if (!ok) throw std::runtime_error("AES-GCM seal failed");
    return out;
}

std::optional<Bytes> AesGcmAead::open(std::span<const std::uint8_t> blob,
                                      std::span<const std::uint8_t> ad) const {
    if (blob.size() < 12 + 16) return std::nullopt;
    const size_t ptlen = blob.size() - 12 - 16;
    Bytes out(ptlen);
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    int outl = 0;
    bool ok = EVP_DecryptInit_ex(ctx, EVP_aes_256_gcm(), nullptr, nullptr, nullptr) == 1 &&
              EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_IVLEN, 12, nullptr) == 1 &&
              EVP_DecryptInit_ex(ctx, nullptr, nullptr, key_.data(), blob.data()) == 1;
    if (ok && !ad.empty())
        ok = EVP_DecryptUpdate(ctx, nullptr, &outl, ad.data(), static_cast<int>(ad.size())) == 1;
    if (ok && ptlen > 0)
        ok = EVP_DecryptUpdate(ctx, out.data(), &outl, blob.data() + 12,
                               static_cast<int>(ptlen)) == 1;
    Bytes tag(blob.end() - 16, blob.end());
    if (ok)
        ok = EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG, 16, tag.data()) == 1;
    int fin = 0;
    if (ok) ok = EVP_DecryptFinal_ex(ctx, out.data() + outl, &fin) == 1;
    EVP_CIPHER_CTX_free(ctx);
    if (!ok) return std::nullopt;
    return out;
}

OreCiphertext ore_encrypt(Coord value, const Prf& prf, Coord inf) {
    const std::uint64_t u = static_cast<std::uint64_t>(value + inf);
    OreCiphertext ct;
    std::uint8_t data[9];
    for (int i = 0; i < kOreBits; ++i) {
        const std::uint64_t prefix = i == 0 ? 0 : (u >> (kOreBits - i));
        const int bit = static_cast<int>((u >> (kOreBits - 1 - i)) & 1);
        std::memcpy(data, &prefix, 8);
        data[8] = static_cast<std::uint8_t>(i);
        const auto mac = prf.eval(std::span<const std::uint8_t>(data, 9));
        ct.digits[static_cast<size_t>(i)] =
            static_cast<std::uint8_t>((mac[0] % 3 + bit) % 3);
    }
    return ct;
}

OreComparison ore_compare(const OreCiphertext& a, const OreCiphertext& b) {
    for (int i = 0; i < kOreBits; ++i) {
        const int da = a.digits[static_cast<size_t>(i)];
        const int db = b.digits[static_cast<size_t>(i)];
        if (da == db) continue;
        // (da - db) mod 3 == 1 exactly when a's bit is 1 and b's is 0.
        const int d = (da - db + 3) % 3;
        return OreComparison{d == 1 ? 1 : -1, i};
    }
    return OreComparison{0, -1};
}

std::uint64_t OpeDictionary::rank(int dim, Coord v) const {
    const auto& vals = values[static_cast<size_t>(dim)];
    const auto it = std::lower_bound(vals.begin(), vals.end(), v);
    if (it == vals.end() || *it != v) throw std::invalid_argument("OpeDictionary: value absent");
    return static_cast<std::uint64_t>(it - vals.begin());
}

std::uint64_t OpeDictionary::encode_value(int dim, Coord v) const {
    return 2 * rank(dim, v) + 1;
}

std::uint64_t OpeDictionary::encode_query(int dim, Coord v) const {
    const auto& vals = values[static_cast<size_t>(dim)];
    const auto it = std::lower_bound(vals.begin(), vals.end(), v);
    const std::uint64_t below = static_cast<std::uint64_t>(it - vals.begin());
    if (it != vals.end() && *it == v) return 2 * below + 1;
    return 2 * below;
}

Bytes OpeDictionary::serialize() const {
    Writer w;
    w.put(static_cast<std::uint32_t>(values.size()));
    for (const auto& vals : values) {
        w.put(static_cast<std::uint32_t>(vals.size()));
        std::uint64_t r = 0;
        for (Coord v : vals) {
            w.put(static_cast<std::int64_t>(v));
            w.put(r++);
        }
    }
    return std::move(w.buf);
}

OpeDictionary OpeDictionary::deserialize(std::span<const std::uint8_t> bytes) {
    Reader rd{bytes};
    OpeDictionary dict;
    dict.values.resize(rd.get<std::uint32_t>());
    for (auto& vals : dict.values) {
        vals.resize(rd.get<std::uint32_t>());
        for (Coord& v : vals) {
            v = rd.get<std::int64_t>();
            (void)rd.get<std::uint64_t>();
        }
    }
    return dict;
}

OpeDictionary build_ope_dictionary(std::span<const SkyIndex> idxs) {
    if (idxs.empty()) throw std::invalid_argument("build_ope_dictionary: no indexes");
    const int dim = idxs.front().dim;
    OpeDictionary dict;
    dict.values.assign(static_cast<size_t>(dim), {});
    for (const SkyIndex& idx : idxs) {
        for (const IndexNode& n : idx.nodes) {
            if (n.is_leaf()) continue;
            for (size_t p = 0; p < n.chain.size(); ++p)
                dict.values[static_cast<size_t>(chain_dim(static_cast<int>(p), dim))]
                    .push_back(n.chain[p]);
        }
        for (int d = 0; d < dim; ++d)
            for (Coord c : idx.side_coords[static_cast<size_t>(d)])
                dict.values[static_cast<size_t>(d)].push_back(c);
    }
    for (auto& vals : dict.values) {
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    }
    return dict;
}

SecretKeys SecretKeys::from_seed(std::uint64_t seed) {
    SecretKeys k;
    k.master.resize(32);
    std::mt19937_64 rng(seed);
    for (auto& b : k.master) b = static_cast<std::uint8_t>(rng());
    return k;
}

Bytes SecretKeys::subkey(std::string_view label, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c) const {
    Bytes data(label.begin(), label.end());
    Writer w;
    w.put(a);
    w.put(b);
    w.put(c);
    data.insert(data.end(), w.buf.begin(), w.buf.end());
    const auto mac = HmacPrf(master).eval(data);
    return Bytes(mac.begin(), mac.end());
}

namespace {

std::vector<int> node_depths(const SkyIndex& idx) {
    std::vector<int> depth(idx.nodes.size(), 0);
    std::vector<std::int32_t> stack{0};
    while (!stack.empty()) {
        const std::int32_t at = stack.back();
        stack.pop_back();
        const IndexNode& n = idx.nodes[static_cast<size_t>(at)];
        if (n.is_leaf()) continue;
        depth[static_cast<size_t>(n.left)] = depth[static_cast<size_t>(at)] + 1;
        depth[static_cast<size_t>(n.right)] = depth[static_cast<size_t>(at)] + 1;
        stack.push_back(n.left);
        stack.push_back(n.right);
    }
    return depth;
}

Bytes leaf_plaintext(const std::vector<PointId>& content, const Dataset& D,
                     std::uint32_t padded_count, int dim) {
    Writer w;
    w.put(static_cast<std::uint32_t>(content.size()));
    for (PointId id : content) {
        w.put(id);
        for (int d = 0; d < dim; ++d) w.put(static_cast<std::int64_t>(D[id][d]));
    }
    for (std::uint32_t i = static_cast<std::uint32_t>(content.size()); i < padded_count; ++i) {
        w.put(PointId{-1});
        for (int d = 0; d < dim; ++d) w.put(std::int64_t{0});
    }
    return std::move(w.buf);
}

Bytes side_plaintext(const SkyIndex& idx, const Dataset& D,
                     const std::vector<std::int32_t>& region_list) {
    Writer w;
    w.put(static_cast<std::uint32_t>(region_list.size()));
    for (std::int32_t r : region_list) {
        const SkylineRegion& reg = idx.regions[static_cast<size_t>(r)];
        w.put(reg.generator);
        for (int d = 0; d < idx.dim; ++d)
            w.put(static_cast<std::int64_t>(D[reg.generator][d]));
        w.put(static_cast<std::uint32_t>(reg.borders.size()));
        for (const BorderBox& b : reg.borders) {
            w.put(b.border);
            for (int d = 0; d < idx.dim; ++d) {
                w.put(b.side[static_cast<size_t>(d)]);
                w.put(static_cast<std::int64_t>(b.mid[static_cast<size_t>(d)]));
            }
        }
    }
    return std::move(w.buf);
}

Bytes make_ad(std::string_view tag, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    Bytes data(tag.begin(), tag.end());
    Writer w;
    w.put(a);
    w.put(b);
    w.put(c);
    data.insert(data.end(), w.buf.begin(), w.buf.end());
    return data;
}

}  // namespace

EncIndexSet encrypt_indexes(std::span<const SkyIndex> idxs, const Dataset& D,
                            const SecretKeys& keys, SecureMode mode, bool pad_leaves,
                            std::uint64_t l, std::int64_t k) {
    if (mode == SecureMode::kPlain)
        throw std::invalid_argument("encrypt_indexes: mode must be mope or pore");
    EncIndexSet set;
    set.mode = mode;
    set.padded = pad_leaves;
    set.dim = idxs.empty() ? 0 : idxs.front().dim;
    set.inf = idxs.empty() ? kDefaultInf : idxs.front().inf;
    set.l = l;
    set.k = k;

    OpeDictionary dict;
    if (mode == SecureMode::kMope) dict = build_ope_dictionary(idxs);

    for (size_t xi = 0; xi < idxs.size(); ++xi) {
        const SkyIndex& idx = idxs[xi];
        EncIndex enc;
        enc.mode = mode;
        enc.dim = idx.dim;
        enc.height = idx.height();
        const std::vector<int> depth = node_depths(idx);
        const AesGcmAead aead(keys.subkey("aead", xi));

        // Per (level, dim) PRFs for the node chains, one per level so every
        // comparison at the SP uses an independently encrypted value.
        std::vector<std::vector<HmacPrf>> level_prfs;
        if (mode == SecureMode::kPore) {
            level_prfs.reserve(static_cast<size_t>(enc.height));
            for (int lev = 0; lev < enc.height; ++lev) {
                std::vector<HmacPrf> per_dim;
                for (int d = 0; d < idx.dim; ++d)
                    per_dim.emplace_back(keys.subkey("ore", xi, static_cast<std::uint64_t>(lev),
                                                     static_cast<std::uint64_t>(d)));
                level_prfs.push_back(std::move(per_dim));
            }
        }

        enc.nodes.resize(idx.nodes.size());
        for (size_t ni = 0; ni < idx.nodes.size(); ++ni) {
            const IndexNode& n = idx.nodes[ni];
            EncNode& en = enc.nodes[ni];
            en.left = n.left;
            en.right = n.right;
            en.payload = n.payload;
            if (n.is_leaf()) continue;
            if (mode == SecureMode::kMope) {
                for (size_t p = 0; p < n.chain.size(); ++p)
                    en.mope_chain.push_back(dict.encode_value(
                        chain_dim(static_cast<int>(p), idx.dim), n.chain[p]));
            } else {
                const int lev = depth[ni];
                for (size_t p = 0; p < n.chain.size(); ++p) {
                    const int d = chain_dim(static_cast<int>(p), idx.dim);
                    en.pore_chain.push_back(ore_encrypt(
                        n.chain[p],
                        level_prfs[static_cast<size_t>(lev)][static_cast<size_t>(d)], idx.inf));
                }
            }
        }

        std::uint32_t pad_count = 0;
        if (pad_leaves)
            for (const auto& leaf : idx.leaf_contents)
                pad_count = std::max(pad_count, static_cast<std::uint32_t>(leaf.size()));
        for (size_t li = 0; li < idx.leaf_contents.size(); ++li) {
            const std::uint32_t stored =
                pad_leaves ? pad_count
                           : static_cast<std::uint32_t>(idx.leaf_contents[li].size());
            const Bytes pt = leaf_plaintext(idx.leaf_contents[li], D, stored, idx.dim);
            enc.leaf_blobs.push_back(
                aead.seal(pt, make_ad("leaf", xi, li, 0), static_cast<std::uint64_t>(li)));
            enc.leaf_point_counts.push_back(stored);
        }

        enc.side.assign(static_cast<size_t>(idx.dim), {});
        std::uint64_t side_seq = std::uint64_t{1} << 32;
        for (int d = 0; d < idx.dim; ++d) {
            const HmacPrf side_prf(keys.subkey("ore-side", xi, static_cast<std::uint64_t>(d)));
            const auto& coords = idx.side_coords[static_cast<size_t>(d)];
            for (size_t c = 0; c < coords.size(); ++c) {
                EncSideEntry ent;
                if (mode == SecureMode::kMope)
                    ent.mope_key = dict.encode_value(d, coords[c]);
                else
                    ent.pore_key = ore_encrypt(coords[c], side_prf, idx.inf);
                const Bytes pt =
                    side_plaintext(idx, D, idx.side_regions[static_cast<size_t>(d)][c]);
                ent.blob = aead.seal(pt, make_ad("side", xi, static_cast<std::uint64_t>(d), c),
                                     side_seq++);
                enc.side[static_cast<size_t>(d)].push_back(std::move(ent));
            }
        }
        set.indexes.push_back(std::move(enc));
    }
    return set;
}

EncQuery encode_query(const OpeDictionary* dict, const SecretKeys* keys, const Query& q,
                      const EncIndexSet& set, size_t index_ordinal) {
    EncQuery eq;
    eq.mode = set.mode;
    if (set.mode == SecureMode::kMope) {
        if (!dict) throw std::invalid_argument("encode_query: mope mode needs the dictionary");
        for (int d = 0; d < set.dim; ++d)
            eq.mope_ranks.push_back(dict->encode_query(d, q[d]));
        return eq;
    }
    if (!keys) throw std::invalid_argument("encode_query: pore mode needs the secret keys");
    const EncIndex& idx = set.indexes[index_ordinal];
    for (int lev = 0; lev < idx.height; ++lev) {
        std::vector<OreCiphertext> per_dim;
        for (int d = 0; d < set.dim; ++d) {
            const HmacPrf prf(keys->subkey("ore", index_ordinal,
                                           static_cast<std::uint64_t>(lev),
                                           static_cast<std::uint64_t>(d)));
            per_dim.push_back(ore_encrypt(q[d], prf, set.inf));
        }
        eq.pore_levels.push_back(std::move(per_dim));
    }
    for (int d = 0; d < set.dim; ++d) {
        const HmacPrf prf(keys->subkey("ore-side", index_ordinal,
                                       static_cast<std::uint64_t>(d)));
        eq.pore_side.push_back(ore_encrypt(q[d], prf, set.inf));
    }
    return eq;
}

EncResult enc_lookup(const EncIndex& eidx, const EncQuery& eq) {
    EncResult res;
    std::int32_t at = 0;
    int lev = 0;
    while (!eidx.nodes[static_cast<size_t>(at)].is_leaf()) {
        const EncNode& n = eidx.nodes[static_cast<size_t>(at)];
        bool left = true;
        bool decided = false;
        const int dim = eidx.dim;
        for (int t = 0; t + 1 < dim && !decided; ++t) {
            // q[t] < lo -> left; q[t] >= hi -> right; otherwise fall through
            int cmp_lo, cmp_hi;
            if (eq.mode == SecureMode::kMope) {
                const std::uint64_t qr = eq.mope_ranks[static_cast<size_t>(t)];
                cmp_lo = qr < n.mope_chain[static_cast<size_t>(2 * t)] ? -1 : 1;
                cmp_hi = qr < n.mope_chain[static_cast<size_t>(2 * t + 1)] ? -1 : 1;
            } else {
                cmp_lo = ore_compare(eq.pore_levels[static_cast<size_t>(lev)]
                                                   [static_cast<size_t>(t)],
                                     n.pore_chain[static_cast<size_t>(2 * t)])
                             .order;
                cmp_hi = ore_compare(eq.pore_levels[static_cast<size_t>(lev)]
                                                   [static_cast<size_t>(t)],
                                     n.pore_chain[static_cast<size_t>(2 * t + 1)])
                             .order;
            }
            if (cmp_lo < 0) {
                left = true;
                decided = true;
            } else if (cmp_hi >= 0) {
                left = false;
                decided = true;
            }
        }
        if (!decided) {
            const int t = dim - 1;
            if (eq.mode == SecureMode::kMope) {
                left = eq.mope_ranks[static_cast<size_t>(t)] <
                       n.mope_chain[static_cast<size_t>(2 * t)];
            } else {
                left = ore_compare(eq.pore_levels[static_cast<size_t>(lev)]
                                                 [static_cast<size_t>(t)],
                                   n.pore_chain[static_cast<size_t>(2 * t)])
                           .order < 0;
            }
        }
        res.path.decisions.push_back(left ? 0 : 1);
        at = left ? n.left : n.right;
        ++lev;
    }
    res.path.payload = eidx.nodes[static_cast<size_t>(at)].payload;
    res.leaf_blob = eidx.leaf_blobs[static_cast<size_t>(res.path.payload)];

    for (int d = 0; d < eidx.dim; ++d) {
        const auto& entries = eidx.side[static_cast<size_t>(d)];
        size_t lo = 0, hi = entries.size();
        while (lo < hi) {
            const size_t mid = lo + (hi - lo) / 2;
            int cmp;
            if (eq.mode == SecureMode::kMope) {
                const std::uint64_t key = entries[mid].mope_key;
                const std::uint64_t qr = eq.mope_ranks[static_cast<size_t>(d)];
                cmp = key < qr ? -1 : (key == qr ? 0 : 1);
            } else {
                cmp = -ore_compare(eq.pore_side[static_cast<size_t>(d)],
                                   entries[mid].pore_key)
                           .order;
            }
            if (cmp == 0) {
                res.side_blobs.push_back(
                    EncResult::SideBlob{d, static_cast<std::uint32_t>(mid),
                                        entries[mid].blob});
                break;
            }
            if (cmp < 0)
                lo = mid + 1;
            else
                hi = mid;
        }
    }
    return res;
}

std::vector<Point> decrypt_candidates(const SecretKeys& keys, const EncIndexSet& set,
                                      size_t index_ordinal, const Query& q,
                                      const EncResult& res) {
    const AesGcmAead aead(keys.subkey("aead", index_ordinal));
    const auto pt = aead.open(res.leaf_blob,
                              make_ad("leaf", index_ordinal,
                                      static_cast<std::uint64_t>(res.path.payload), 0));
    if (!pt) throw std::runtime_error("decrypt_candidates: leaf blob failed authentication");

    std::vector<Point> cand;
    {
        Reader rd{*pt};
        const std::uint32_t real = rd.get<std::uint32_t>();
        (void)real;
        const size_t entry = sizeof(PointId) + static_cast<size_t>(set.dim) * 8;
        const size_t count = (pt->size() - 4) / entry;
        for (size_t i = 0; i < count; ++i) {
            const PointId id = rd.get<PointId>();
            std::vector<Coord> coords(static_cast<size_t>(set.dim));
            for (Coord& c : coords) c = rd.get<std::int64_t>();
            if (id < 0) continue;  // padding
            cand.emplace_back(id, std::move(coords));
        }
    }

    std::vector<Coord> q2(q.coords.size());
    for (size_t i = 0; i < q2.size(); ++i) q2[i] = q.coords[i] * 2;
    for (const auto& sb : res.side_blobs) {
        const auto spt = aead.open(
            sb.blob, make_ad("side", index_ordinal, static_cast<std::uint64_t>(sb.dim),
                             sb.pos));
        if (!spt)
            throw std::runtime_error("decrypt_candidates: boundary blob failed authentication");
        Reader rd{*spt};
        const std::uint32_t nregions = rd.get<std::uint32_t>();
        for (std::uint32_t r = 0; r < nregions; ++r) {
            const PointId gen = rd.get<PointId>();
            std::vector<Coord> gcoords(static_cast<size_t>(set.dim));
            for (Coord& c : gcoords) c = rd.get<std::int64_t>();
            const std::uint32_t nb = rd.get<std::uint32_t>();
            bool member = true;
            for (std::uint32_t b = 0; b < nb; ++b) {
                (void)rd.get<PointId>();
                BorderBox bb;
                bb.side.resize(static_cast<size_t>(set.dim));
                bb.mid.resize(static_cast<size_t>(set.dim));
                for (int d = 0; d < set.dim; ++d) {
                    bb.side[static_cast<size_t>(d)] = rd.get<std::int8_t>();
                    bb.mid[static_cast<size_t>(d)] = rd.get<std::int64_t>();
                }
                if (member && bb.dominated2(q2)) member = false;
            }
            const auto at = std::find_if(cand.begin(), cand.end(),
                                         [&](const Point& p) { return p.id == gen; });
            if (member && at == cand.end())
                cand.emplace_back(gen, std::move(gcoords));
            else if (!member && at != cand.end())
                cand.erase(at);
        }
    }
    return cand;
}

std::vector<Point> secure_query(const OpeDictionary* dict, const SecretKeys& keys,
                                const EncIndexSet& set, const Query& q) {
    std::vector<Point> all;
    for (size_t xi = 0; xi < set.indexes.size(); ++xi) {
        const EncQuery eq = encode_query(dict, &keys, q, set, xi);
        const EncResult res = enc_lookup(set.indexes[xi], eq);
        for (Point& p : decrypt_candidates(keys, set, xi, q, res)) {
            const bool dup = std::any_of(all.begin(), all.end(),
                                         [&](const Point& e) { return e.id == p.id; });
            if (!dup) all.push_back(std::move(p));
        }
    }
    return client_filter(all, q);
}

LeakageReport leakage_report(const EncIndexSet& set) {
    LeakageReport rep;
    rep.index_count = set.indexes.size();
    for (const EncIndex& idx : set.indexes) {
        LeakageReport::PerIndex per;
        per.height = idx.height;
        for (const EncNode& n : idx.nodes)
            per.node_content_sizes.push_back(
                n.is_leaf() ? idx.leaf_point_counts[static_cast<size_t>(n.payload)] : 0);
        rep.indexes.push_back(std::move(per));
    }
    return rep;
}

namespace {

Bytes serialize_enc_impl(const EncIndexSet& set, bool zero_ciphertexts) {
    Writer w;
    w.put(std::uint32_t{0x54594B53});  // "SKYT"
    w.put(std::uint32_t{1});
    w.put(static_cast<std::uint8_t>(set.mode));
    w.put(static_cast<std::uint8_t>(set.padded ? 1 : 0));
    w.put(static_cast<std::uint16_t>(set.dim));
    w.put(set.l);
    w.put(set.k);
    w.put(set.inf);
    w.put(static_cast<std::uint32_t>(set.indexes.size()));
    for (const EncIndex& idx : set.indexes) {
        w.put(static_cast<std::uint32_t>(idx.dim));
        w.put(static_cast<std::uint32_t>(idx.height));
        w.put(static_cast<std::uint32_t>(idx.nodes.size()));
        for (const EncNode& n : idx.nodes) {
            w.put(n.left);
            w.put(n.right);
            w.put(n.payload);
            w.put(static_cast<std::uint32_t>(n.mope_chain.size()));
            for (std::uint64_t r : n.mope_chain) w.put(r);
            w.put(static_cast<std::uint32_t>(n.pore_chain.size()));
            for (const OreCiphertext& ct : n.pore_chain) {
                if (zero_ciphertexts) {
                    const OreCiphertext zero{};
                    w.put(zero);
                } else {
                    w.put(ct);
                }
            }
        }
        w.put(static_cast<std::uint32_t>(idx.leaf_blobs.size()));
        for (size_t li = 0; li < idx.leaf_blobs.size(); ++li) {
            w.put(idx.leaf_point_counts[li]);
            if (zero_ciphertexts) {
                Bytes zero(idx.leaf_blobs[li].size(), 0);
                w.put_bytes(zero);
            } else {
                w.put_bytes(idx.leaf_blobs[li]);
            }
        }
        w.put(static_cast<std::uint32_t>(idx.side.size()));
        for (const auto& entries : idx.side) {
            w.put(static_cast<std::uint32_t>(entries.size()));
            for (const EncSideEntry& e : entries) {
                w.put(e.mope_key);
                if (zero_ciphertexts) {
                    const OreCiphertext zero{};
                    w.put(zero);
                    Bytes zb(e.blob.size(), 0);
                    w.put_bytes(zb);
                } else {
                    w.put(e.pore_key);
                    w.put_bytes(e.blob);
                }
            }
        }
    }
    return std::move(w.buf);
}

}  // namespace

Bytes structural_digest(const EncIndexSet& set) { return serialize_enc_impl(set, true); }

Bytes serialize_enc_indexes(const EncIndexSet& set) { return serialize_enc_impl(set, false); }

EncIndexSet deserialize_enc_indexes(std::span<const std::uint8_t> bytes) {
    Reader rd{bytes};
    if (rd.get<std::uint32_t>() != 0x54594B53)
        throw std::runtime_error("not a SKYT index file");
    if (rd.get<std::uint32_t>() != 1) throw std::runtime_error("unsupported version");
    EncIndexSet set;
    set.mode = static_cast<SecureMode>(rd.get<std::uint8_t>());
    set.padded = rd.get<std::uint8_t>() != 0;
    set.dim = rd.get<std::uint16_t>();
    set.l = rd.get<std::uint64_t>();
    set.k = rd.get<std::int64_t>();
    set.inf = rd.get<Coord>();
    set.indexes.resize(rd.get<std::uint32_t>());
    for (EncIndex& idx : set.indexes) {
        idx.mode = set.mode;
        idx.dim = static_cast<int>(rd.get<std::uint32_t>());
        idx.height = static_cast<int>(rd.get<std::uint32_t>());
        idx.nodes.resize(rd.get<std::uint32_t>());
        for (EncNode& n : idx.nodes) {
            n.left = rd.get<std::int32_t>();
            n.right = rd.get<std::int32_t>();
            n.payload = rd.get<std::int32_t>();
            n.mope_chain.resize(rd.get<std::uint32_t>());
            for (std::uint64_t& r : n.mope_chain) r = rd.get<std::uint64_t>();
            n.pore_chain.resize(rd.get<std::uint32_t>());
            for (OreCiphertext& ct : n.pore_chain) ct = rd.get<OreCiphertext>();
        }
        const std::uint32_t nleaf = rd.get<std::uint32_t>();
        idx.leaf_blobs.resize(nleaf);
        idx.leaf_point_counts.resize(nleaf);
        for (std::uint32_t li = 0; li < nleaf; ++li) {
            idx.leaf_point_counts[li] = rd.get<std::uint32_t>();
            idx.leaf_blobs[li] = rd.get_bytes();
        }
        idx.side.resize(rd.get<std::uint32_t>());
        for (auto& entries : idx.side) {
            entries.resize(rd.get<std::uint32_t>());
            for (EncSideEntry& e : entries) {
                e.mope_key = rd.get<std::uint64_t>();
                e.pore_key = rd.get<OreCiphertext>();
                e.blob = rd.get_bytes();
            }
        }
    }
    return set;
}

}  // namespace skytile
