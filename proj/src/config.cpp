#include "stegokey/config.hpp"

#include <charconv>
#include <sstream>

#include "stegokey/wav.hpp" // read_file

namespace stegokey {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ConfigInvalid, "bad " + what + " value '" + s + "'");
    }
    return v;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s, const std::string& what) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_u64(item, what));
    }
    return out;
}

std::vector<std::uint8_t> parse_hex(const std::string& s) {
    if (s.empty() || s.size() % 2 != 0) {
        throw Error(ErrorCode::ConfigInvalid, "seed must be a non-empty even-length hex string");
    }
    auto nibble = [&](char c) -> std::uint8_t {
        if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
        throw Error(ErrorCode::ConfigInvalid, std::string("bad hex digit '") + c + "'");
    };
    std::vector<std::uint8_t> out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>((nibble(s[2 * i]) << 4) | nibble(s[2 * i + 1]));
    }
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

// key=value field on a class line
std::optional<std::string> field_value(const std::vector<std::string>& fields,
                                       const std::string& key) {
    for (const auto& f : fields) {
        if (f.rfind(key + "=", 0) == 0) return f.substr(key.size() + 1);
    }
    return std::nullopt;
}

} // namespace

Config parse_config(const std::string& text) {
    Config cfg;
    std::vector<ClassNode> nodes;
    bool in_scheme = false;
    bool seed_set = false;

    std::istringstream lines(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(lines, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;

        if (line == "[scheme]") {
            in_scheme = true;
            continue;
        }
        if (line.rfind("class ", 0) == 0) {
            in_scheme = false;
            std::stringstream ss(line);
            std::string word;
            std::vector<std::string> fields;
            while (ss >> word) fields.push_back(word);
            if (fields.size() < 3) {
                throw Error(ErrorCode::ConfigInvalid,
                            "line " + std::to_string(line_no) + ": class line needs id and param");
            }
            ClassNode node;
            node.id = static_cast<ClassId>(parse_u64(fields[1], "class id"));
            if (node.id == 0) {
                throw Error(ErrorCode::ConfigInvalid,
                            "line " + std::to_string(line_no) + ": class ids are 1-based");
            }
            const auto param = field_value(fields, "param");
            const auto parents = field_value(fields, "parents");
            const auto users = field_value(fields, "users");
            if (!param || !parents) {
                throw Error(ErrorCode::ConfigInvalid,
                            "line " + std::to_string(line_no) + ": class line needs param= and parents=");
            }
            node.public_param = parse_u64(*param, "param");
            for (auto id : parse_u64_list(*parents, "parent id")) {
                node.parents.insert(static_cast<ClassId>(id));
            }
            if (users) {
                for (auto id : parse_u64_list(*users, "user id")) {
                    if (id == 0) {
                        throw Error(ErrorCode::ConfigInvalid,
                                    "line " + std::to_string(line_no) + ": user ids are positive");
                    }
                    node.users.insert(static_cast<UserId>(id));
                }
            }
            nodes.push_back(std::move(node));
            continue;
        }

        const auto eq = line.find('=');
        if (!in_scheme || eq == std::string::npos) {
            throw Error(ErrorCode::ConfigInvalid,
                        "line " + std::to_string(line_no) + ": unrecognized directive '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "seed") {
            cfg.scheme.master_secret = parse_hex(value);
            seed_set = true;
        } else if (key == "t") {
            cfg.scheme.t = static_cast<std::uint32_t>(parse_u64(value, "t"));
        } else if (key == "m") {
            cfg.configured_m = static_cast<std::uint32_t>(parse_u64(value, "m"));
        } else if (key == "p") {
            cfg.scheme.p = parse_u64(value, "p");
        } else if (key == "epoch") {
            cfg.scheme.epoch = parse_u64(value, "epoch");
        } else if (key == "dummies") {
            cfg.scheme.dummies = parse_u64_list(value, "dummy param");
        } else {
            throw Error(ErrorCode::ConfigInvalid, "unknown scheme key '" + key + "'");
        }
    }

    if (!seed_set) {
        throw Error(ErrorCode::ConfigInvalid, "missing seed in [scheme] section");
    }
    if (cfg.scheme.p < 2) {
        throw Error(ErrorCode::ConfigInvalid, "modulus p must exceed 1");
    }
    cfg.hierarchy = Hierarchy(std::move(nodes));
    cfg.scheme.m = choose_m(cfg.hierarchy, cfg.configured_m);
    if (cfg.scheme.m == 0) {
        throw Error(ErrorCode::ConfigInvalid, "scheme needs at least one variable");
    }
    for (ClassId c : cfg.hierarchy.ids()) {
        if (cfg.hierarchy.node(c).public_param >= cfg.scheme.p) {
            throw Error(ErrorCode::ConfigInvalid,
                        "class " + std::to_string(c) + " param is not below p");
        }
    }
    for (auto d : cfg.scheme.dummies) {
        if (d >= cfg.scheme.p) {
            throw Error(ErrorCode::ConfigInvalid, "dummy param " + std::to_string(d) +
                                                      " is not below p");
        }
    }
    cfg.warnings = check_dummies(cfg.hierarchy, cfg.scheme.dummies, cfg.scheme.m);
    return cfg;
}

std::string serialize_config(const Config& config) {
    std::ostringstream out;
    out << "[scheme]\n";
    out << "seed = " << to_hex(config.scheme.master_secret) << "\n";
    out << "t = " << config.scheme.t << "\n";
    if (config.configured_m) out << "m = " << *config.configured_m << "\n";
    out << "p = " << config.scheme.p << "\n";
    out << "epoch = " << config.scheme.epoch << "\n";
    out << "dummies = ";
    for (std::size_t i = 0; i < config.scheme.dummies.size(); ++i) {
        if (i) out << ",";
        out << config.scheme.dummies[i];
    }
    out << "\n\n";
    for (ClassId c : config.hierarchy.ids()) {
        const auto& node = config.hierarchy.node(c);
        out << "class " << node.id << " param=" << node.public_param << " parents=";
        std::size_t i = 0;
        for (ClassId p : node.parents) out << (i++ ? "," : "") << p;
        if (!node.users.empty()) {
            out << " users=";
            i = 0;
            for (UserId u : node.users) out << (i++ ? "," : "") << u;
        }
        out << "\n";
    }
    return out.str();
}

Config load_config(const std::string& path) {
    const auto bytes = read_file(path);
    return parse_config(std::string(bytes.begin(), bytes.end()));
}

} // namespace stegokey
