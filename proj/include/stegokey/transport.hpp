#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "stegokey/config.hpp"
#include "stegokey/payload.hpp"
#include "stegokey/stego.hpp"

namespace stegokey {

// Wire format (normative): magic "SPAS" | flags 1B | length 4B BE | body.
// flags bit0 marks a service message. The body is a stego WAV; the intended
// class never travels on the wire.

inline constexpr std::size_t kDefaultFrameCap = 64ull << 20; // 64 MiB
inline constexpr std::uint8_t kFlagService = 0x01;

struct WireFrame {
    std::uint8_t flags = 0;
    std::vector<std::uint8_t> body;

    bool is_service() const { return flags & kFlagService; }
    bool operator==(const WireFrame&) const = default;
};

std::vector<std::uint8_t> encode_frame(const WireFrame& frame);

/// Strict decode of one frame; throws BadMagic / FrameTooLarge /
/// TruncatedFrame. The socket reader uses the same validation.
WireFrame decode_frame(std::span<const std::uint8_t> bytes,
                       std::size_t max_frame_bytes = kDefaultFrameCap);

struct TargetResult {
    std::string address;
    bool ok = false;
    std::string error;
};

struct DeliveryReport {
    std::vector<TargetResult> targets;

    bool all_ok() const;
    std::size_t failures() const;
};

/// Writes the frame to every target over TCP. Per-target failures are
/// recorded in the report; they never abort the remaining targets.
DeliveryReport send_frame(const std::vector<std::string>& targets, const WireFrame& frame);

/// Accepting side: binds immediately, handles connections concurrently and
/// hands out frames in arrival order. Malformed input drops the connection
/// and is recorded under errors().
class Receiver {
public:
    Receiver(const std::string& host, std::uint16_t port,
             std::size_t max_frame_bytes = kDefaultFrameCap);
    ~Receiver();

    Receiver(const Receiver&) = delete;
    Receiver& operator=(const Receiver&) = delete;

    std::uint16_t port() const { return port_; }

    /// Blocks for the next frame; nullopt once stop() was called and the
    /// queue drained.
    std::optional<WireFrame> next_frame();

    void stop();

    std::vector<std::string> errors() const;

private:
    void accept_loop(int listen_fd);
    void connection_loop(int fd);
    void record_error(const std::string& message);

    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::size_t max_frame_bytes_;

    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<WireFrame> frames_;
    std::vector<std::string> errors_;
    std::set<int> conn_fds_;
    bool stopped_ = false;

    std::vector<std::thread> workers_;
    std::thread accept_thread_;
};

// --- receiver-side access control ----------------------------------------

struct ReceiverProfile {
    ClassId cls = 0;
    UserId user_id = 0;
};

/// Checks the profile against the hierarchy roster (UnknownClass/UnknownUser).
void validate_profile(const Config& config, const ReceiverProfile& profile);

/// The key this profile may use for `intended`: its own class key, a derived
/// descendant key, or AccessDenied when intended is neither.
ClassKey key_for(const Config& config, ClassId own, ClassId intended);

/// Full receive path for a known intended class: pick the key, extract from
/// the stego WAV in the frame body, open the envelope.
Payload try_open_as(const Config& config, const ReceiverProfile& profile,
                    const WireFrame& frame, ClassId intended,
                    std::uint32_t frame_len = kDefaultFrameLen);

struct OpenResult {
    Payload payload;
    ClassId key_class = 0; // whose key opened it
};

/// Attempts the profile's own class, then every descendant in topological
/// order. The first envelope that verifies wins; nullopt when none does.
std::optional<OpenResult> try_open_any(const Config& config, const ReceiverProfile& profile,
                                       const WireFrame& frame,
                                       std::uint32_t frame_len = kDefaultFrameLen);

/// Seals a text payload under the recipient's private user key. Both users
/// must belong to the sender's class.
std::vector<std::uint8_t> peer_message(const Config& config, const ReceiverProfile& sender,
                                       UserId recipient, std::span<const std::uint8_t> body);

Payload open_peer_message(const Config& config, const ReceiverProfile& recipient,
                          std::span<const std::uint8_t> sealed);

// --- churn scripting -------------------------------------------------------

/// One batch per line, ops separated by ';':
///   join <class> <user>      leave <class> <user>
///   add-class <id> param=<v> parents=<id,...>
///   remove-class <id>
std::vector<std::vector<MembershipEvent>> parse_churn_script(const std::string& text);

/// CSV with an `epoch,joins,leaves,unicast,broadcast` header row.
std::string rekey_log_csv(const RekeyLog& log);

} // namespace stegokey
