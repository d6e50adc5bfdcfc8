// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Run directly or through ctest (`ctest -R acceptance`).

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "stegokey/transport.hpp"
#include "support/fixtures.hpp"
#include "support/poly_oracle.hpp"

using namespace stegokey;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    std::string name;
    std::function<void()> run;
    double budget_seconds = 0; // 0 = no budget
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

// ---------------------------------------------------------------------------

// 1. The eight private-key values from their stated group keys.
void private_key_table() {
    const struct {
        std::uint64_t group_key;
        UserId user;
        std::uint64_t expected;
    } rows[] = {
        {699615258ULL, 21, 732930270ULL},  {699615258ULL, 22, 731415951ULL},
        {699615258ULL, 23, 730033312ULL},  {699615258ULL, 24, 728765893ULL},
        {1947982264ULL, 41, 1995494026ULL}, {1947982264ULL, 42, 1994362794ULL},
        {1947982264ULL, 43, 1993284177ULL}, {1947982264ULL, 44, 1992254588ULL},
    };
    for (const auto& row : rows) {
        const auto got = user_key_value(row.group_key, row.user);
        expect(got == row.expected,
               "user" + std::to_string(row.user) + ": got " + std::to_string(got) +
                   ", want " + std::to_string(row.expected));
    }
}

// 2. Derivation soundness on the nine-class hierarchy with stock parameters.
void derivation_soundness() {
    const auto cfg = fixtures::nine_class();
    expect(cfg.scheme.m == 7 && cfg.scheme.t == 2, "scheme defaults drifted");
    std::size_t pairs = 0;
    for (ClassId d : cfg.hierarchy.ids()) {
        const auto own = compute_class_key(cfg.scheme, cfg.hierarchy, d);
        for (ClassId a : cfg.hierarchy.ids()) {
            if (cfg.hierarchy.is_ancestor(a, d)) {
                ++pairs;
                const auto derived = derive_descendant_key(cfg.scheme, cfg.hierarchy, a, d);
                expect(derived.value == own.value,
                       "derive " + std::to_string(a) + "->" + std::to_string(d) +
                           " disagrees with the class's own key");
            } else {
                bool refused = false;
                try {
                    derive_descendant_key(cfg.scheme, cfg.hierarchy, a, d);
                } catch (const Error& e) {
                    refused = e.code() == ErrorCode::NotAncestor;
                }
                expect(refused, "derive " + std::to_string(a) + "->" + std::to_string(d) +
                                    " should refuse with NotAncestor");
            }
        }
    }
    expect(pairs == 17, "expected 17 ancestor-descendant pairs, saw " + std::to_string(pairs));
}

// 3. eval_P vs the naive nested-loop oracle.
void oracle_equivalence() {
    std::mt19937_64 rng(20260809);
    for (int trial = 0; trial < 200; ++trial) {
        Scheme s;
        for (int i = 0; i < 16; ++i) s.master_secret.push_back(static_cast<std::uint8_t>(rng()));
        s.t = static_cast<std::uint32_t>(rng() % 4);
        s.m = 1 + static_cast<std::uint32_t>(rng() % 7);
        double terms = 1;
        for (std::uint32_t k = 0; k < s.m; ++k) terms *= s.t + 1.0;
        while (terms > 1e4) {
            terms /= s.t + 1.0;
            --s.m;
        }
        s.p = trial % 2 ? 2147483647ULL : 2147483646ULL;
        s.epoch = rng() % 8;
        std::vector<std::uint64_t> params(s.m);
        for (auto& x : params) x = rng() % s.p;
        expect(eval_P(s, params) == oracle::eval_poly(s, params),
               "instance " + std::to_string(trial) + " disagrees with the oracle");
    }
}

// 4. Permutation symmetry of eval_P.
void symmetry_property() {
    std::mt19937_64 rng(424242);
    const auto nine = fixtures::nine_class();
    int checks = 0;
    while (checks < 1000) {
        Scheme s;
        for (int i = 0; i < 16; ++i) s.master_secret.push_back(static_cast<std::uint8_t>(rng()));
        s.t = 1 + static_cast<std::uint32_t>(rng() % 2);
        s.m = 2 + static_cast<std::uint32_t>(rng() % 4);
        if (std::pow(s.t + 1.0, s.m) > 300) s.t = 1;
        s.p = nine.scheme.p;
        s.epoch = rng() % 4;
        std::vector<std::uint64_t> params(s.m);
        for (auto& x : params) x = rng() % s.p;
        const auto reference = eval_P(s, params);
        for (int k = 0; k < 8 && checks < 1000; ++k, ++checks) {
            auto perm = params;
            std::shuffle(perm.begin(), perm.end(), rng);
            expect(eval_P(s, perm) == reference, "permutation changed the value");
        }
    }
}

// 5. Stego round trip with byte-length and bit-locality checks.
void stego_round_trip() {
    std::mt19937_64 rng(5u);
    for (int trial = 0; trial < 100; ++trial) {
        const auto channels = static_cast<std::uint16_t>(1 + rng() % 3);
        const std::size_t frames = 160 + rng() % 2000;
        std::vector<std::vector<std::int16_t>> data;
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            data.push_back(fixtures::random_samples(rng, frames * kDefaultFrameLen));
        }
        const auto cover = make_wav(32000, std::move(data));
        const ClassKey key{rng(), 1, rng() % 4};

        // payload sized anywhere up to the worst-case capacity
        const std::size_t cap = capacity_bits(cover) / 8;
        Payload p;
        p.kind = trial % 2 ? PayloadKind::Image : PayloadKind::Text;
        p.name = "p";
        p.body = fixtures::random_bytes(rng, 1 + rng() % (cap - kEnvelopeMinSize - 1));
        const auto sealed = seal(p, key.value, key.epoch);
        expect(sealed.size() <= cap, "sealed payload oversized for the cover");

        const auto stego = embed(cover, sealed, key);
        expect(extract(stego, key) == sealed, "round trip broke at trial " + std::to_string(trial));
        expect(open(extract(stego, key), key.value, key.epoch) == p,
               "opened payload differs at trial " + std::to_string(trial));

        const auto cover_bytes = serialize_wav(cover);
        const auto stego_bytes = serialize_wav(stego);
        expect(stego_bytes.size() == cover_bytes.size(), "stego size != cover size");

        const auto g = derive_geometry(key, frames);
        const auto allowed = static_cast<std::uint16_t>((1u << g.loc1) | (1u << g.loc2));
        std::size_t population = 0;
        for (std::uint16_t ch = 0; ch < channels; ++ch) {
            for (std::size_t i = 0; i < cover.samples[ch].size(); ++i) {
                const auto diff = static_cast<std::uint16_t>(
                    static_cast<std::uint16_t>(cover.samples[ch][i]) ^
                    static_cast<std::uint16_t>(stego.samples[ch][i]));
                if (diff == 0) continue;
                expect((diff & ~allowed) == 0, "a bit outside loc1/loc2 changed");
                expect(i % kDefaultFrameLen == 0 && i / kDefaultFrameLen >= g.start_frame,
                       "a non-designated sample changed");
                population += std::popcount(diff);
            }
        }
        expect(population <= sealed.size() * 8, "bit-diff population exceeds payload bits");
    }
}

// 6. WAV fidelity across a fixture corpus, the reference header included.
void wav_fidelity() {
    const auto reference = fixtures::hexdump_wav();
    const auto wav = parse_wav(reference);
    expect(wav.channels == 2, "reference channels");
    expect(wav.sample_rate == 11025, "reference sample rate");
    expect(wav.byte_rate == 44100, "reference byte rate");
    expect(wav.block_align == 4, "reference block align");
    expect(wav.bits_per_sample == 16, "reference bit depth");
    expect(serialize_wav(wav) == reference, "reference file round trip");

    std::mt19937_64 rng(66);
    for (int trial = 0; trial < 25; ++trial) {
        const auto channels = static_cast<std::uint16_t>(1 + rng() % 3);
        const auto frames = rng() % 400;
        std::vector<fixtures::RawChunk> extras;
        if (trial % 2) extras.push_back({"LIST", fixtures::random_bytes(rng, 1 + rng() % 9)});
        const auto file = fixtures::write_wav_independent(
            channels, 8000 << (trial % 3), fixtures::random_samples(rng, frames * channels),
            {}, extras, trial % 3 ? extras : std::vector<fixtures::RawChunk>{},
            trial % 4 ? std::vector<std::uint8_t>{0, 0} : std::vector<std::uint8_t>{});
        expect(serialize_wav(parse_wav(file)) == file,
               "corpus round trip broke at trial " + std::to_string(trial));
    }
}

// 7. The 81-pair access matrix of the nine-class hierarchy.
void access_matrix() {
    std::mt19937_64 rng(7u);
    auto cfg = fixtures::nine_class();
    for (ClassId c : cfg.hierarchy.ids()) {
        cfg.hierarchy.add_user(c, 1000 + c);
    }
    Payload p{PayloadKind::Image, "scan", fixtures::random_bytes(rng, 64)};

    std::size_t successes = 0;
    for (ClassId intended : cfg.hierarchy.ids()) {
        const auto key = compute_class_key(cfg.scheme, cfg.hierarchy, intended);
        const auto sealed = seal(p, key.value, key.epoch);
        const std::size_t frames = sealed.size() * 8 / 2 + 64;
        std::vector<std::vector<std::int16_t>> data(
            2, fixtures::random_samples(rng, frames * kDefaultFrameLen));
        WireFrame frame;
        frame.body = serialize_wav(embed(make_wav(32000, std::move(data)), sealed, key));

        for (ClassId receiver : cfg.hierarchy.ids()) {
            const ReceiverProfile profile{receiver, 1000 + receiver};
            const bool should_open =
                receiver == intended || cfg.hierarchy.is_ancestor(receiver, intended);
            try {
                const auto got = try_open_as(cfg, profile, frame, intended);
                expect(should_open, std::to_string(receiver) + " must not read traffic for " +
                                        std::to_string(intended));
                expect(got == p, "payload corrupted on the allowed path");
                ++successes;
            } catch (const Error& e) {
                expect(!should_open, std::to_string(receiver) + " failed to read " +
                                         std::to_string(intended) + ": " + e.what());
                expect(e.code() == ErrorCode::AccessDenied,
                       std::string("denial must be AccessDenied, got ") + e.what());
            }
        }
    }
    expect(successes == 9 + 17, "expected 26 open pairs, saw " + std::to_string(successes));
}

// 8. Rekey accounting plus the forward-secrecy proxy.
void rekey_accounting() {
    std::mt19937_64 rng(8u);
    auto cfg = fixtures::two_class();

    // a pre-churn frame for class 4
    Payload p{PayloadKind::Text, "memo", fixtures::random_bytes(rng, 48)};
    const auto old_key = compute_class_key(cfg.scheme, cfg.hierarchy, 4);
    const auto sealed = seal(p, old_key.value, old_key.epoch);
    const std::size_t frames = sealed.size() * 8 / 2 + 64;
    std::vector<std::vector<std::int16_t>> data(
        2, fixtures::random_samples(rng, frames * kDefaultFrameLen));
    WireFrame frame;
    frame.body = serialize_wav(embed(make_wav(32000, std::move(data)), sealed, old_key));

    const auto batches = parse_churn_script(
        "join 2 25; join 2 26; join 2 27\n"
        "leave 2 21; leave 2 22; leave 2 23; leave 2 24; leave 2 25\n"
        "join 2 31; join 2 32; leave 2 26\n");
    RekeyLog log;
    std::vector<std::uint64_t> epochs;
    for (const auto& batch : batches) {
        epochs.push_back(apply_batch(cfg.hierarchy, cfg.scheme.epoch, batch, log).epoch);
    }
    const std::uint32_t want[3][2] = {{6, 1}, {0, 1}, {4, 1}};
    for (std::size_t i = 0; i < 3; ++i) {
        expect(log.events[i].unicast_msgs == want[i][0] &&
                   log.events[i].broadcast_msgs == want[i][1],
               "batch " + std::to_string(i) + " accounting: got (" +
                   std::to_string(log.events[i].unicast_msgs) + "," +
                   std::to_string(log.events[i].broadcast_msgs) + ")");
    }
    expect(epochs[0] == 0 && epochs[1] == 1 && epochs[2] == 2,
           "epoch must bump exactly on batches containing leaves");

    // forward secrecy proxy: the pre-churn frame is dead to post-churn keys
    bool rejected = false;
    try {
        try_open_as(cfg, ReceiverProfile{4, 41}, frame, 4);
    } catch (const Error&) {
        rejected = true;
    }
    expect(rejected, "pre-rekey frame still opens after the epoch bump");

    const auto new_key = compute_class_key(cfg.scheme, cfg.hierarchy, 4);
    expect(new_key.value != old_key.value, "class key unchanged by the rekey");
}

// 9. Wrong-key extraction attempts must never yield a valid envelope.
void wrong_key_rejection() {
    std::mt19937_64 rng(9u);
    const auto cfg = fixtures::nine_class();
    const auto key = compute_class_key(cfg.scheme, cfg.hierarchy, 7);
    Payload p{PayloadKind::Text, "note", fixtures::random_bytes(rng, 256)};
    const auto sealed = seal(p, key.value, key.epoch);

    const std::size_t frames = sealed.size() * 8 / 2 + 64;
    std::vector<std::vector<std::int16_t>> data(
        2, fixtures::random_samples(rng, frames * kDefaultFrameLen));
    const auto stego = embed(make_wav(32000, std::move(data)), sealed, key);

    int false_accepts = 0;
    for (int trial = 0; trial < 100; ++trial) {
        ClassKey wrong{rng(), 7, key.epoch};
        if (wrong.value == key.value) wrong.value ^= 1;
        try {
            const auto bytes = extract(stego, wrong);
            open(bytes, wrong.value, wrong.epoch);
            ++false_accepts;
        } catch (const Error&) {
        }
    }
    expect(false_accepts == 0,
           std::to_string(false_accepts) + " wrong keys produced a valid envelope");
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1 private-key table reproduction", private_key_table, 0.001},
        {"2 derivation soundness on the nine-class hierarchy", derivation_soundness, 5.0},
        {"3 eval_P vs naive oracle on 200 instances", oracle_equivalence, 0},
        {"4 permutation symmetry, 1000 checks", symmetry_property, 0},
        {"5 stego round trip on 100 triples", stego_round_trip, 30.0},
        {"6 WAV parse/serialize byte fidelity", wav_fidelity, 0},
        {"7 access-control matrix over 81 pairs", access_matrix, 0},
        {"8 rekey accounting and forward secrecy", rekey_accounting, 0},
        {"9 wrong-key rejection, 100 attempts", wrong_key_rejection, 0},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto begin = Clock::now();
        std::string verdict = "PASS";
        std::string detail;
        try {
            c.run();
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failed;
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - begin).count();
        if (verdict == "PASS" && c.budget_seconds > 0 && seconds > c.budget_seconds) {
            verdict = "FAIL";
            detail = "exceeded the " + std::to_string(c.budget_seconds) + "s budget";
            ++failed;
        }
        std::printf("%s  criterion %-52s (%.3fs)%s%s\n", verdict.c_str(), c.name.c_str(),
                    seconds, detail.empty() ? "" : "  ", detail.c_str());
    }
    if (failed != 0) {
        std::printf("%d of %zu criteria failed\n", failed, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
