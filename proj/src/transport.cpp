#include "stegokey/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <sstream>

namespace stegokey {

namespace {

constexpr std::uint8_t kWireMagic[4] = {'S', 'P', 'A', 'S'};
constexpr std::size_t kWireHeader = 9; // magic + flags + length

struct AddrParts {
    std::string host;
    std::string port;
};

AddrParts split_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
        throw Error(ErrorCode::ConfigInvalid, "address '" + address + "' is not host:port");
    }
    return {address.substr(0, colon), address.substr(colon + 1)};
}

class Fd {
public:
    explicit Fd(int fd = -1) : fd_(fd) {}
    ~Fd() { reset(); }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;

    int get() const { return fd_; }
    int release() {
        int fd = fd_;
        fd_ = -1;
        return fd;
    }
    void reset(int fd = -1) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = fd;
    }

private:
    int fd_;
};

void write_all(int fd, const std::uint8_t* data, std::size_t len) {
    while (len > 0) {
        const ssize_t n = ::send(fd, data, len, MSG_NOSIGNAL);
        if (n <= 0) {
            throw Error(ErrorCode::ConnectionFailed, std::strerror(errno));
        }
        data += n;
        len -= static_cast<std::size_t>(n);
    }
}

// Returns bytes read; short only on EOF.
std::size_t read_upto(int fd, std::uint8_t* data, std::size_t len) {
    std::size_t got = 0;
    while (got < len) {
        const ssize_t n = ::recv(fd, data + got, len - got, 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(ErrorCode::ConnectionFailed, std::strerror(errno));
        }
        if (n == 0) break;
        got += static_cast<std::size_t>(n);
    }
    return got;
}

std::uint32_t read_u32_be(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

} // namespace

std::vector<std::uint8_t> encode_frame(const WireFrame& frame) {
    std::vector<std::uint8_t> out;
    out.reserve(kWireHeader + frame.body.size());
    out.insert(out.end(), kWireMagic, kWireMagic + 4);
    out.push_back(frame.flags);
    const auto len = static_cast<std::uint32_t>(frame.body.size());
    out.push_back(static_cast<std::uint8_t>(len >> 24));
    out.push_back(static_cast<std::uint8_t>(len >> 16));
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len));
    out.insert(out.end(), frame.body.begin(), frame.body.end());
    return out;
}

WireFrame decode_frame(std::span<const std::uint8_t> bytes, std::size_t max_frame_bytes) {
    if (bytes.size() < kWireHeader) {
        throw Error(ErrorCode::TruncatedFrame, "incomplete frame header");
    }
    if (std::memcmp(bytes.data(), kWireMagic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "frame magic mismatch");
    }
    const std::uint32_t len = read_u32_be(bytes.data() + 5);
    if (len > max_frame_bytes) {
        throw Error(ErrorCode::FrameTooLarge,
                    std::to_string(len) + " bytes exceeds the " +
                        std::to_string(max_frame_bytes) + " byte cap");
    }
    if (bytes.size() != kWireHeader + len) {
        throw Error(ErrorCode::TruncatedFrame, "frame body length mismatch");
    }
    WireFrame f;
    f.flags = bytes[4];
    f.body.assign(bytes.begin() + kWireHeader, bytes.end());
    return f;
}

bool DeliveryReport::all_ok() const {
    for (const auto& t : targets) {
        if (!t.ok) return false;
    }
    return true;
}

std::size_t DeliveryReport::failures() const {
    std::size_t n = 0;
    for (const auto& t : targets) {
        if (!t.ok) ++n;
    }
    return n;
}

DeliveryReport send_frame(const std::vector<std::string>& targets, const WireFrame& frame) {
    const auto encoded = encode_frame(frame);
    DeliveryReport report;
    for (const auto& address : targets) {
        TargetResult result;
        result.address = address;
        try {
            const auto parts = split_address(address);
            addrinfo hints{};
            hints.ai_family = AF_UNSPEC;
            hints.ai_socktype = SOCK_STREAM;
            addrinfo* res = nullptr;
            const int rc = ::getaddrinfo(parts.host.c_str(), parts.port.c_str(), &hints, &res);
            if (rc != 0) {
                throw Error(ErrorCode::ConnectionFailed, gai_strerror(rc));
            }
            Fd fd;
            std::string last_error = "no addresses";
            for (addrinfo* ai = res; ai; ai = ai->ai_next) {
                Fd candidate(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
                if (candidate.get() < 0) {
                    last_error = std::strerror(errno);
                    continue;
                }
                if (::connect(candidate.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
                    fd.reset(candidate.release());
                    break;
                }
                last_error = std::strerror(errno);
            }
            ::freeaddrinfo(res);
            if (fd.get() < 0) {
                throw Error(ErrorCode::ConnectionFailed, last_error);
            }
            write_all(fd.get(), encoded.data(), encoded.size());
            result.ok = true;
        } catch (const Error& e) {
            result.error = e.what();
        }
        report.targets.push_back(std::move(result));
    }
    return report;
}

Receiver::Receiver(const std::string& host, std::uint16_t port, std::size_t max_frame_bytes)
    : max_frame_bytes_(max_frame_bytes) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
    if (rc != 0) {
        throw Error(ErrorCode::ConnectionFailed, gai_strerror(rc));
    }
    Fd fd;
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        Fd candidate(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (candidate.get() < 0) {
            last_error = std::strerror(errno);
            continue;
        }
        const int one = 1;
        ::setsockopt(candidate.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
        if (::bind(candidate.get(), ai->ai_addr, ai->ai_addrlen) == 0 &&
            ::listen(candidate.get(), 16) == 0) {
            fd.reset(candidate.release());
            break;
        }
        last_error = std::strerror(errno);
    }
    ::freeaddrinfo(res);
    if (fd.get() < 0) {
        throw Error(ErrorCode::ConnectionFailed, "cannot listen on " + host + ": " + last_error);
    }

    sockaddr_storage bound{};
    socklen_t bound_len = sizeof(bound);
    if (::getsockname(fd.get(), reinterpret_cast<sockaddr*>(&bound), &bound_len) == 0) {
        if (bound.ss_family == AF_INET) {
            port_ = ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
        } else if (bound.ss_family == AF_INET6) {
            port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port);
        }
    }

    listen_fd_ = fd.release();
    accept_thread_ = std::thread([this, lfd = listen_fd_] { accept_loop(lfd); });
}

Receiver::~Receiver() {
    stop();
}

void Receiver::accept_loop(int listen_fd) {
    for (;;) {
        const int fd = ::accept(listen_fd, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            break; // listen socket closed by stop()
        }
        std::lock_guard lock(mutex_);
        if (stopped_) {
            ::close(fd);
            break;
        }
        conn_fds_.insert(fd);
        workers_.emplace_back([this, fd] { connection_loop(fd); });
    }
}

void Receiver::connection_loop(int fd) {
    try {
        for (;;) {
            std::uint8_t header[kWireHeader];
            const std::size_t got = read_upto(fd, header, sizeof(header));
            if (got == 0) break; // clean close between frames
            if (got < sizeof(header)) {
                throw Error(ErrorCode::TruncatedFrame, "connection closed mid-header");
            }
            if (std::memcmp(header, kWireMagic, 4) != 0) {
                throw Error(ErrorCode::BadMagic, "frame magic mismatch");
            }
            const std::uint32_t len = read_u32_be(header + 5);
            if (len > max_frame_bytes_) {
                throw Error(ErrorCode::FrameTooLarge,
                            std::to_string(len) + " bytes exceeds the cap");
            }
            WireFrame frame;
            frame.flags = header[4];
            frame.body.resize(len);
            if (read_upto(fd, frame.body.data(), len) != len) {
                throw Error(ErrorCode::TruncatedFrame, "connection closed mid-body");
            }
            std::lock_guard lock(mutex_);
            frames_.push_back(std::move(frame));
            cv_.notify_all();
        }
    } catch (const Error& e) {
        record_error(e.what());
    }
    std::lock_guard lock(mutex_);
    conn_fds_.erase(fd);
    ::close(fd);
}

void Receiver::record_error(const std::string& message) {
    std::lock_guard lock(mutex_);
    errors_.push_back(message);
}

std::optional<WireFrame> Receiver::next_frame() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [this] { return !frames_.empty() || stopped_; });
    if (frames_.empty()) return std::nullopt;
    WireFrame f = std::move(frames_.front());
    frames_.pop_front();
    return f;
}

void Receiver::stop() {
    std::vector<std::thread> workers;
    int listen_fd = -1;
    {
        std::lock_guard lock(mutex_);
        if (stopped_) return;
        stopped_ = true;
        for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
        workers.swap(workers_);
        listen_fd = listen_fd_;
        listen_fd_ = -1;
    }
    if (listen_fd >= 0) {
        ::shutdown(listen_fd, SHUT_RDWR);
        ::close(listen_fd);
    }
    cv_.notify_all();
    if (accept_thread_.joinable()) accept_thread_.join();
    for (auto& w : workers) {
        if (w.joinable()) w.join();
    }
}

std::vector<std::string> Receiver::errors() const {
    std::lock_guard lock(mutex_);
    return errors_;
}

// --- receiver-side access control ----------------------------------------

void validate_profile(const Config& config, const ReceiverProfile& profile) {
    const auto& node = config.hierarchy.node(profile.cls);
    if (!node.users.count(profile.user_id)) {
        throw Error(ErrorCode::UnknownUser,
                    "user " + std::to_string(profile.user_id) + " is not in class " +
                        std::to_string(profile.cls));
    }
}

ClassKey key_for(const Config& config, ClassId own, ClassId intended) {
    if (own == intended) {
        return compute_class_key(config.scheme, config.hierarchy, own);
    }
    if (config.hierarchy.is_ancestor(own, intended)) {
        return derive_descendant_key(config.scheme, config.hierarchy, own, intended);
    }
    throw Error(ErrorCode::AccessDenied,
                "class " + std::to_string(own) + " cannot read traffic for class " +
                    std::to_string(intended));
}

Payload try_open_as(const Config& config, const ReceiverProfile& profile,
                    const WireFrame& frame, ClassId intended, std::uint32_t frame_len) {
    validate_profile(config, profile);
    const ClassKey key = key_for(config, profile.cls, intended);
    const WavAudio stego = parse_wav(frame.body);
    const auto sealed = extract(stego, key, frame_len);
    return open(sealed, key.value, key.epoch);
}

std::optional<OpenResult> try_open_any(const Config& config, const ReceiverProfile& profile,
                                       const WireFrame& frame, std::uint32_t frame_len) {
    validate_profile(config, profile);
    const WavAudio stego = parse_wav(frame.body);

    std::vector<ClassId> candidates{profile.cls};
    for (ClassId c : config.hierarchy.topological_order()) {
        if (c != profile.cls && config.hierarchy.is_ancestor(profile.cls, c)) {
            candidates.push_back(c);
        }
    }
    for (ClassId c : candidates) {
        try {
            const ClassKey key = key_for(config, profile.cls, c);
            const auto sealed = extract(stego, key, frame_len);
            return OpenResult{open(sealed, key.value, key.epoch), c};
        } catch (const Error&) {
            // wrong geometry, wrong keystream, or damaged envelope: try the next key
        }
    }
    return std::nullopt;
}

std::vector<std::uint8_t> peer_message(const Config& config, const ReceiverProfile& sender,
                                       UserId recipient, std::span<const std::uint8_t> body) {
    validate_profile(config, sender);
    const auto& node = config.hierarchy.node(sender.cls);
    if (!node.users.count(recipient)) {
        throw Error(ErrorCode::NotSameClass,
                    "user " + std::to_string(recipient) + " is not in class " +
                        std::to_string(sender.cls));
    }
    const ClassKey class_key = compute_class_key(config.scheme, config.hierarchy, sender.cls);
    const UserKey to_key = compute_user_key(class_key, recipient);
    Payload p;
    p.kind = PayloadKind::Text;
    p.name = "peer";
    p.body.assign(body.begin(), body.end());
    return seal(p, to_key.value, config.scheme.epoch);
}

Payload open_peer_message(const Config& config, const ReceiverProfile& recipient,
                          std::span<const std::uint8_t> sealed) {
    validate_profile(config, recipient);
    const ClassKey class_key = compute_class_key(config.scheme, config.hierarchy, recipient.cls);
    const UserKey own = compute_user_key(class_key, recipient.user_id);
    return open(sealed, own.value, config.scheme.epoch);
}

// --- churn scripting -------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, delim)) out.push_back(item);
    return out;
}

std::string strip(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

MembershipEvent parse_churn_op(const std::string& op) {
    std::stringstream ss(op);
    std::string word;
    std::vector<std::string> tokens;
    while (ss >> word) tokens.push_back(word);
    if (tokens.empty()) {
        throw Error(ErrorCode::ConfigInvalid, "empty churn op");
    }
    MembershipEvent ev;
    const std::string& verb = tokens[0];
    auto to_u32 = [&](const std::string& s) {
        try {
            return static_cast<std::uint32_t>(std::stoul(s));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ConfigInvalid, "bad number '" + s + "' in churn op");
        }
    };
    if (verb == "join" || verb == "leave") {
        if (tokens.size() != 3) {
            throw Error(ErrorCode::ConfigInvalid, "'" + op + "' wants: " + verb + " <class> <user>");
        }
        ev.kind = verb == "join" ? EventKind::Join : EventKind::Leave;
        ev.scope = EventScope::User;
        ev.class_id = to_u32(tokens[1]);
        ev.user_id = to_u32(tokens[2]);
        return ev;
    }
    if (verb == "remove-class") {
        if (tokens.size() != 2) {
            throw Error(ErrorCode::ConfigInvalid, "'" + op + "' wants: remove-class <id>");
        }
        ev.kind = EventKind::Leave;
        ev.scope = EventScope::Class;
        ev.class_id = to_u32(tokens[1]);
        return ev;
    }
    if (verb == "add-class") {
        if (tokens.size() < 3) {
            throw Error(ErrorCode::ConfigInvalid,
                        "'" + op + "' wants: add-class <id> param=<v> parents=<ids>");
        }
        ev.kind = EventKind::Join;
        ev.scope = EventScope::Class;
        ev.new_class.id = to_u32(tokens[1]);
        ev.class_id = ev.new_class.id;
        bool have_param = false;
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            if (tokens[i].rfind("param=", 0) == 0) {
                ev.new_class.public_param = std::stoull(tokens[i].substr(6));
                have_param = true;
            } else if (tokens[i].rfind("parents=", 0) == 0) {
                for (const auto& id : split(tokens[i].substr(8), ',')) {
                    if (!strip(id).empty()) ev.new_class.parents.insert(to_u32(strip(id)));
                }
            } else {
                throw Error(ErrorCode::ConfigInvalid, "unknown add-class field '" + tokens[i] + "'");
            }
        }
        if (!have_param) {
            throw Error(ErrorCode::ConfigInvalid, "add-class needs param=<v>");
        }
        return ev;
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown churn verb '" + verb + "'");
}

} // namespace

std::vector<std::vector<MembershipEvent>> parse_churn_script(const std::string& text) {
    std::vector<std::vector<MembershipEvent>> batches;
    std::istringstream lines(text);
    std::string raw;
    while (std::getline(lines, raw)) {
        const auto hash = raw.find('#');
        const std::string line = strip(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        std::vector<MembershipEvent> batch;
        for (const auto& op : split(line, ';')) {
            const auto cleaned = strip(op);
            if (!cleaned.empty()) batch.push_back(parse_churn_op(cleaned));
        }
        batches.push_back(std::move(batch));
    }
    return batches;
}

std::string rekey_log_csv(const RekeyLog& log) {
    std::ostringstream out;
    out << "epoch,joins,leaves,unicast,broadcast\n";
    for (const auto& e : log.events) {
        out << e.epoch << ',' << e.joins << ',' << e.leaves << ',' << e.unicast_msgs << ','
            << e.broadcast_msgs << '\n';
    }
    return out.str();
}

} // namespace stegokey
