// stegokey: multilevel-access stego transmission toolkit.
//
// Subcommands: keygen, derive, embed, extract, send, recv, simulate-churn,
// inspect-wav, gen-cover. See README.md for the full surface.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>

#include "stegokey/config.hpp"
#include "stegokey/transport.hpp"

namespace sk = stegokey;

namespace {

sk::Config load_with_warnings(const std::string& path) {
    sk::Config cfg = sk::load_config(path);
    for (const auto& w : cfg.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    return cfg;
}

std::vector<std::string> split_targets(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(csv);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::pair<std::string, std::uint16_t> parse_listen(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos) {
        throw sk::Error(sk::ErrorCode::ConfigInvalid, "listen address must be host:port");
    }
    return {address.substr(0, colon),
            static_cast<std::uint16_t>(std::stoul(address.substr(colon + 1)))};
}

sk::PayloadKind kind_from_string(const std::string& s) {
    if (s == "image") return sk::PayloadKind::Image;
    if (s == "text") return sk::PayloadKind::Text;
    if (s == "service") return sk::PayloadKind::Service;
    throw sk::Error(sk::ErrorCode::ConfigInvalid, "kind must be image, text, or service");
}

const char* kind_name(sk::PayloadKind k) {
    switch (k) {
    case sk::PayloadKind::Image: return "image";
    case sk::PayloadKind::Text: return "text";
    case sk::PayloadKind::Service: return "service";
    }
    return "?";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical-key audio steganography toolkit"};
    app.require_subcommand(1);

    std::string config_path, cover_path, payload_path, in_path, out_path, name_override;
    std::string kind_str = "text", targets_csv, listen_addr, spool_dir, script_path;
    std::uint32_t class_id = 0, target_class = 0, user_id = 0;
    std::uint32_t frame_len = sk::kDefaultFrameLen;
    std::size_t frame_cap = sk::kDefaultFrameCap;
    std::size_t max_frames = 0;
    bool service_flag = false;
    double seconds = 2.0;
    std::uint32_t rate = 32000, channels = 2;
    std::uint64_t gen_seed = 1;

    auto* keygen = app.add_subcommand("keygen", "Print a class key (or a user's private key)");
    keygen->add_option("--class", class_id, "Class id")->required();
    keygen->add_option("--user", user_id, "User id for a private key");
    keygen->add_option("--config", config_path, "Deployment config")->required();

    auto* derive = app.add_subcommand("derive", "Derive a descendant class key");
    derive->add_option("--as", class_id, "Acting class id")->required();
    derive->add_option("--target", target_class, "Descendant class id")->required();
    derive->add_option("--config", config_path, "Deployment config")->required();

    auto* embed = app.add_subcommand("embed", "Hide a payload file inside a cover WAV");
    embed->add_option("--cover", cover_path, "Cover WAV")->required();
    embed->add_option("--payload", payload_path, "File to hide")->required();
    embed->add_option("--class", class_id, "Intended class id")->required();
    embed->add_option("--config", config_path, "Deployment config")->required();
    embed->add_option("--out", out_path, "Output stego WAV")->required();
    embed->add_option("--kind", kind_str, "Payload kind: image|text|service");
    embed->add_option("--name", name_override, "Payload name (default: file name)");
    embed->add_option("--frame-len", frame_len, "Samples per channel per frame");

    auto* extract = app.add_subcommand("extract", "Recover a payload from a stego WAV");
    extract->add_option("--in", in_path, "Stego WAV")->required();
    extract->add_option("--class", class_id, "Receiver class id")->required();
    extract->add_option("--user", user_id, "Receiver user id");
    extract->add_option("--config", config_path, "Deployment config")->required();
    extract->add_option("--out", out_path, "Where to write the payload body")->required();
    extract->add_option("--frame-len", frame_len, "Samples per channel per frame");

    auto* send = app.add_subcommand("send", "Send a stego WAV to one or more receivers");
    send->add_option("--to", targets_csv, "host:port[,host:port...]")->required();
    send->add_option("--in", in_path, "Stego WAV to send")->required();
    send->add_flag("--service", service_flag, "Mark the frame as a service message");

    auto* recv = app.add_subcommand("recv", "Receive frames and spool their WAV bodies");
    recv->add_option("--listen", listen_addr, "host:port")->required();
    recv->add_option("--spool", spool_dir, "Directory for received WAVs")->required();
    recv->add_option("--max-frames", max_frames, "Stop after N frames (0 = run until killed)");
    recv->add_option("--cap", frame_cap, "Frame size cap in bytes");

    auto* churn = app.add_subcommand("simulate-churn", "Apply a membership script, print the rekey log");
    churn->add_option("--script", script_path, "Churn script")->required();
    churn->add_option("--config", config_path, "Deployment config")->required();
    churn->add_option("--out", out_path, "Write the updated config here");

    auto* inspect = app.add_subcommand("inspect-wav", "Describe a WAV and its stego capacity");
    inspect->add_option("file", in_path, "WAV file")->required();
    inspect->add_option("--frame-len", frame_len, "Samples per channel per frame");

    auto* gen = app.add_subcommand("gen-cover", "Generate a synthetic PCM cover file");
    gen->add_option("--out", out_path, "Output WAV")->required();
    gen->add_option("--seconds", seconds, "Duration");
    gen->add_option("--rate", rate, "Sample rate");
    gen->add_option("--channels", channels, "Channel count");
    gen->add_option("--seed", gen_seed, "Noise seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*keygen) {
            const auto cfg = load_with_warnings(config_path);
            const auto key = sk::compute_class_key(cfg.scheme, cfg.hierarchy, class_id);
            if (user_id != 0) {
                std::cout << sk::user_key_value(key.value, user_id) << "\n";
            } else {
                std::cout << key.value << "\n";
            }
            return 0;
        }

        if (*derive) {
            const auto cfg = load_with_warnings(config_path);
            const auto key =
                sk::derive_descendant_key(cfg.scheme, cfg.hierarchy, class_id, target_class);
            std::cout << key.value << "\n";
            return 0;
        }

        if (*embed) {
            const auto cfg = load_with_warnings(config_path);
            const auto cover = sk::parse_wav(sk::read_file(cover_path));
            sk::Payload payload;
            payload.kind = kind_from_string(kind_str);
            payload.name = name_override.empty()
                               ? std::filesystem::path(payload_path).filename().string()
                               : name_override;
            payload.body = sk::read_file(payload_path);
            const auto key = sk::compute_class_key(cfg.scheme, cfg.hierarchy, class_id);
            const auto sealed = sk::seal(payload, key.value, key.epoch);
            const auto stego = sk::embed(cover, sealed, key, frame_len);
            sk::write_file(out_path, sk::serialize_wav(stego));
            std::cerr << "embedded " << payload.body.size() << " payload bytes ("
                      << sealed.size() << " sealed) for class " << class_id << "\n";
            return 0;
        }

        if (*extract) {
            const auto cfg = load_with_warnings(config_path);
            sk::WireFrame frame;
            frame.body = sk::read_file(in_path);
            sk::ReceiverProfile profile{class_id, user_id};
            if (user_id != 0) {
                sk::validate_profile(cfg, profile);
            } else if (!cfg.hierarchy.node(class_id).users.empty()) {
                profile.user_id = *cfg.hierarchy.node(class_id).users.begin();
            } else {
                throw sk::Error(sk::ErrorCode::UnknownUser,
                                "class " + std::to_string(class_id) +
                                    " has no users; pass --user");
            }
            const auto result = sk::try_open_any(cfg, profile, frame, frame_len);
            if (!result) {
                std::cerr << "access denied: no key of class " << class_id
                          << " or its descendants opens this file\n";
                return 2;
            }
            sk::write_file(out_path, result->payload.body);
            std::cerr << "opened with the key of class " << result->key_class << " ("
                      << kind_name(result->payload.kind) << ", name '" << result->payload.name
                      << "', " << result->payload.body.size() << " bytes)\n";
            return 0;
        }

        if (*send) {
            sk::WireFrame frame;
            frame.flags = service_flag ? sk::kFlagService : 0;
            frame.body = sk::read_file(in_path);
            const auto report = sk::send_frame(split_targets(targets_csv), frame);
            for (const auto& t : report.targets) {
                if (t.ok) {
                    std::cout << t.address << " ok\n";
                } else {
                    std::cout << t.address << " FAILED " << t.error << "\n";
                }
            }
            return report.all_ok() ? 0 : 1;
        }

        if (*recv) {
            const auto [host, port] = parse_listen(listen_addr);
            std::filesystem::create_directories(spool_dir);
            sk::Receiver receiver(host, port, frame_cap);
            std::cerr << "listening on " << host << ":" << receiver.port() << "\n";
            std::size_t n = 0;
            while (max_frames == 0 || n < max_frames) {
                auto frame = receiver.next_frame();
                if (!frame) break;
                ++n;
                char name[32];
                std::snprintf(name, sizeof(name), "frame_%04zu.wav", n);
                const auto path = std::filesystem::path(spool_dir) / name;
                sk::write_file(path.string(), frame->body);
                std::cout << path.string() << (frame->is_service() ? " (service)" : "") << "\n";
            }
            receiver.stop();
            for (const auto& e : receiver.errors()) {
                std::cerr << "receive error: " << e << "\n";
            }
            return 0;
        }

        if (*churn) {
            auto cfg = load_with_warnings(config_path);
            const auto script_bytes = sk::read_file(script_path);
            const auto batches =
                sk::parse_churn_script(std::string(script_bytes.begin(), script_bytes.end()));
            sk::RekeyLog log;
            for (const auto& batch : batches) {
                sk::apply_batch(cfg.hierarchy, cfg.scheme.epoch, batch, log);
            }
            std::cout << sk::rekey_log_csv(log);
            if (!out_path.empty()) {
                const auto text = sk::serialize_config(cfg);
                sk::write_file(out_path,
                               std::vector<std::uint8_t>(text.begin(), text.end()));
            }
            return 0;
        }

        if (*inspect) {
            const auto bytes = sk::read_file(in_path);
            const auto wav = sk::parse_wav(bytes);
            std::cout << "channels:        " << wav.channels << "\n"
                      << "sample rate:     " << wav.sample_rate << " Hz\n"
                      << "byte rate:       " << wav.byte_rate << " B/s\n"
                      << "block align:     " << wav.block_align << "\n"
                      << "bits per sample: " << wav.bits_per_sample << "\n"
                      << "frames:          " << wav.frames_per_channel() << " per channel\n"
                      << "file size:       " << bytes.size() << " bytes\n";
            const auto bits = sk::capacity_bits(wav, frame_len);
            std::cout << "stego capacity:  " << bits << " bits (" << bits / 8
                      << " bytes) at frame length " << frame_len << "\n";
            const std::size_t extras = wav.chunks_before_fmt.size() +
                                       wav.chunks_before_data.size() +
                                       wav.chunks_after_data.size();
            if (extras != 0) {
                std::cout << "extra chunks:    " << extras << " (preserved verbatim)\n";
            }
            return 0;
        }

        if (*gen) {
            if (channels == 0 || rate == 0 || seconds <= 0) {
                throw sk::Error(sk::ErrorCode::ConfigInvalid, "bad gen-cover parameters");
            }
            const auto frames = static_cast<std::size_t>(seconds * rate);
            std::vector<std::vector<std::int16_t>> data(channels,
                                                        std::vector<std::int16_t>(frames));
            std::uint64_t state = gen_seed;
            auto noise = [&state] {
                state = state * 6364136223846793005ULL + 1442695040888963407ULL;
                return static_cast<std::int16_t>((state >> 48) & 0x03FF) - 512;
            };
            for (std::uint32_t ch = 0; ch < channels; ++ch) {
                const double freq = 220.0 * (ch + 1);
                for (std::size_t i = 0; i < frames; ++i) {
                    const double s = std::sin(2.0 * M_PI * freq * i / rate);
                    data[ch][i] = static_cast<std::int16_t>(s * 12000 + noise());
                }
            }
            sk::write_file(out_path, sk::serialize_wav(sk::make_wav(rate, std::move(data))));
            std::cerr << "wrote " << out_path << ": " << channels << " ch, " << rate << " Hz, "
                      << frames << " frames\n";
            return 0;
        }
    } catch (const sk::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
