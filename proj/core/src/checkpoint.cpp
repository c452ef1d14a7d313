#include "pursuit/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "pursuit/errors.hpp"

namespace pursuit {

namespace {

constexpr std::array<char, 8> kMagic = {'P', 'U', 'R', 'S', 'U', 'I', 'T', 'C'};

class Writer {
public:
    void bytes(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        buf_.insert(buf_.end(), p, p + n);
    }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    const std::vector<unsigned char>& buffer() const { return buf_; }

private:
    std::vector<unsigned char> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const unsigned char> data) : data_(data) {}

    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) {
            throw CheckpointError(CheckpointError::Kind::Corrupt, "checkpoint is truncated");
        }
    }
    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    std::size_t pos() const { return pos_; }

private:
    std::span<const unsigned char> data_;
    std::size_t pos_ = 0;
};

std::uint64_t fnv1a(std::span<const unsigned char> data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::array<const Mlp*, 4> nets_of(const NetBundle& b) {
    return {&b.policy, &b.policy_target, &b.critic, &b.critic_target};
}

std::array<Mlp*, 4> nets_of(NetBundle& b) { return {&b.policy, &b.policy_target, &b.critic, &b.critic_target}; }

}  // namespace

void save_checkpoint(const std::filesystem::path& path, std::span<const NetBundle> nets) {
    Writer w;
    w.bytes(kMagic.data(), kMagic.size());
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(nets.size()));
    for (const auto& b : nets) {
        w.u32(static_cast<std::uint32_t>(b.robot_id.size()));
        w.bytes(b.robot_id.data(), b.robot_id.size());
    }
    for (const auto& b : nets) {
        for (const Mlp* net : nets_of(b)) {
            w.u32(static_cast<std::uint32_t>(net->layers.size()));
            for (const auto& l : net->layers) {
                w.u32(static_cast<std::uint32_t>(l.weight.rows()));
                w.u32(static_cast<std::uint32_t>(l.weight.cols()));
                w.u8(static_cast<std::uint8_t>(l.activation));
            }
        }
    }
    for (const auto& b : nets) {
        for (const Mlp* net : nets_of(b)) {
            for (const auto& l : net->layers) {
                for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
                    for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.f64(l.weight(r, c));
                }
                for (Eigen::Index r = 0; r < l.bias.size(); ++r) w.f64(l.bias(r));
            }
        }
    }
    w.u64(fnv1a(w.buffer()));

    // Write-then-rename keeps the previous checkpoint intact if writing fails.
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw CheckpointError(CheckpointError::Kind::Missing, "cannot open " + tmp.string() + " for writing");
        }
        out.write(reinterpret_cast<const char*>(w.buffer().data()), static_cast<std::streamsize>(w.buffer().size()));
        if (!out) {
            throw CheckpointError(CheckpointError::Kind::Missing, "failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::vector<NetBundle> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError(CheckpointError::Kind::Missing, "checkpoint not found: " + path.string());
    }
    const std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader r(data);

    if (r.str(kMagic.size()) != std::string(kMagic.data(), kMagic.size())) {
        throw CheckpointError(CheckpointError::Kind::Corrupt, "not a checkpoint file (bad magic)");
    }
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        throw CheckpointError(CheckpointError::Kind::Version,
                              "unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32();
    if (count > 4096) {
        throw CheckpointError(CheckpointError::Kind::Corrupt, "implausible robot count");
    }
    std::vector<NetBundle> nets(count);
    for (auto& b : nets) {
        const std::uint32_t len = r.u32();
        b.robot_id = r.str(len);
    }
    for (auto& b : nets) {
        for (Mlp* net : nets_of(b)) {
            const std::uint32_t depth = r.u32();
            r.need(static_cast<std::size_t>(depth) * 9);
            net->layers.resize(depth);
            for (auto& l : net->layers) {
                const std::uint32_t rows = r.u32();
                const std::uint32_t cols = r.u32();
                const std::uint8_t act = r.u8();
                if (act > static_cast<std::uint8_t>(Activation::Linear) || rows == 0 || cols == 0) {
                    throw CheckpointError(CheckpointError::Kind::Corrupt, "bad layer descriptor");
                }
                r.need(static_cast<std::size_t>(rows) * cols * 8);
                l.weight.resize(rows, cols);
                l.bias.resize(rows);
                l.activation = static_cast<Activation>(act);
            }
        }
    }
    for (auto& b : nets) {
        for (Mlp* net : nets_of(b)) {
            for (auto& l : net->layers) {
                for (Eigen::Index i = 0; i < l.weight.rows(); ++i) {
                    for (Eigen::Index j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = r.f64();
                }
                for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = r.f64();
            }
        }
    }
    const std::size_t payload = r.pos();
    const std::uint64_t stored = r.u64();
    if (stored != fnv1a(std::span(data).first(payload)) || r.pos() != data.size()) {
        throw CheckpointError(CheckpointError::Kind::Corrupt, "checkpoint checksum mismatch");
    }
    return nets;
}

std::vector<NetBundle> load_checkpoint(const std::filesystem::path& path, std::span<const std::string> roster_ids) {
    auto nets = load_checkpoint(path);
    bool match = nets.size() == roster_ids.size();
    for (std::size_t i = 0; match && i < nets.size(); ++i) match = nets[i].robot_id == roster_ids[i];
    if (!match) {
        throw CheckpointError(CheckpointError::Kind::RosterMismatch, "checkpoint roster does not match scenario");
    }
    return nets;
}

}  // namespace pursuit
