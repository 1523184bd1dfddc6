#include "stylelab/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "stylelab/errors.hpp"

namespace stylelab {

namespace {

void put_u16(std::ostream& os, uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>(v >> 8)};
    os.write(reinterpret_cast<char*>(b), 2);
}

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<char*>(b), 4);
}

void put_u64(std::ostream& os, uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<char*>(b), 8);
}

void put_f32(std::ostream& os, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(os, bits);
}

struct Reader {
    std::ifstream in;
    std::string path;
    uint64_t offset = 0;

    [[noreturn]] void fail(const std::string& what) {
        throw FormatError(path + ": " + what + " at offset " + std::to_string(offset));
    }
    void read_bytes(void* dst, size_t n) {
        in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in.gcount()) != n) fail("unexpected end of file");
        offset += n;
    }
    uint16_t u16() {
        unsigned char b[2];
        read_bytes(b, 2);
        return static_cast<uint16_t>(b[0] | (b[1] << 8));
    }
    uint32_t u32() {
        unsigned char b[4];
        read_bytes(b, 4);
        uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    uint64_t u64() {
        unsigned char b[8];
        read_bytes(b, 8);
        uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
};

void write_container(const ParamTable& all, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open '" + path + "' for writing");
    os.write("SFCK", 4);
    put_u32(os, kCheckpointVersion);
    put_u32(os, static_cast<uint32_t>(all.size()));
    for (const auto& [name, tensor] : all) {
        if (name.size() > 0xffff) throw FormatError("tensor name too long: " + name);
        put_u16(os, static_cast<uint16_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        os.put(static_cast<char>(tensor.rank()));
        for (int d : tensor.shape) put_u64(os, static_cast<uint64_t>(d));
        for (double v : tensor.data) put_f32(os, static_cast<float>(v));
    }
    if (!os) throw FormatError("write failed for '" + path + "'");
}

ParamTable read_container(const std::string& path) {
    Reader r;
    r.path = path;
    r.in.open(path, std::ios::binary);
    if (!r.in) throw FormatError("cannot open '" + path + "'");
    char magic[4];
    r.read_bytes(magic, 4);
    if (std::memcmp(magic, "SFCK", 4) != 0) {
        r.offset = 0;
        r.fail("bad magic (expected SFCK)");
    }
    const uint64_t version_off = r.offset;
    uint32_t version = r.u32();
    if (version != kCheckpointVersion) {
        r.offset = version_off;
        r.fail("unsupported version " + std::to_string(version));
    }
    const uint32_t count = r.u32();
    ParamTable all;
    for (uint32_t i = 0; i < count; ++i) {
        const uint16_t name_len = r.u16();
        std::string name(name_len, '\0');
        r.read_bytes(name.data(), name_len);
        unsigned char rank;
        r.read_bytes(&rank, 1);
        if (rank > 4) r.fail("tensor '" + name + "' has unsupported rank");
        std::vector<int> shape;
        size_t numel = 1;
        for (int d = 0; d < rank; ++d) {
            uint64_t dim = r.u64();
            if (dim == 0 || dim > (1u << 24)) r.fail("tensor '" + name + "' has bad dim");
            shape.push_back(static_cast<int>(dim));
            numel *= dim;
        }
        Tensor t(shape);
        for (size_t j = 0; j < numel; ++j) t.data[j] = static_cast<double>(r.f32());
        all[name] = std::move(t);
    }
    return all;
}

Tensor vocab_blob(const Vocabulary& v) {
    std::string joined;
    for (int i = 0; i < v.size(); ++i) {
        if (i) joined += '\n';
        joined += v.word(i);
    }
    Tensor t({static_cast<int>(joined.size())});
    for (size_t i = 0; i < joined.size(); ++i)
        t.data[i] = static_cast<double>(static_cast<unsigned char>(joined[i]));
    return t;
}

Vocabulary vocab_from_blob(const Tensor& t) {
    std::vector<std::string> words;
    std::string cur;
    for (double d : t.data) {
        const char c = static_cast<char>(static_cast<unsigned char>(d));
        if (c == '\n') {
            words.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    words.push_back(cur);
    return Vocabulary(std::move(words));
}

}  // namespace

void save_checkpoint(const TrainableWeights& w, const std::string& path) {
    ParamTable all;
    for (const auto& [k, v] : w.theta) all[k] = v;
    for (const auto& [k, v] : w.phi) all[k] = v;
    for (const auto& [k, v] : w.frozen) all[k] = v;
    Tensor alphas({w.schedule.T + 1});
    Tensor sigmas({w.schedule.T + 1});
    for (int t = 0; t <= w.schedule.T; ++t) {
        alphas.at(t) = w.schedule.alpha(t);
        sigmas.at(t) = w.schedule.sigma(t);
    }
    all["schedule.alphas"] = std::move(alphas);
    all["schedule.sigmas"] = std::move(sigmas);
    all["meta.vocab_utf8"] = vocab_blob(w.vocab);
    Tensor ver({1});
    ver.at(0) = static_cast<double>(w.version);
    all["meta.weights_version"] = std::move(ver);
    write_container(all, path);
}

TrainableWeights load_checkpoint(const std::string& path) {
    ParamTable all = read_container(path);
    TrainableWeights w;
    auto take = [&all, &path](const std::string& name) -> Tensor {
        auto it = all.find(name);
        if (it == all.end()) throw FormatError(path + ": missing tensor '" + name + "'");
        Tensor t = std::move(it->second);
        all.erase(it);
        return t;
    };
    Tensor alphas = take("schedule.alphas");
    Tensor sigmas = take("schedule.sigmas");
    if (!alphas.same_shape(sigmas) || alphas.rank() != 1 || alphas.dim(0) < 2) {
        throw FormatError(path + ": malformed schedule tensors");
    }
    w.schedule.T = alphas.dim(0) - 1;
    w.schedule.alphas.assign(alphas.data.begin(), alphas.data.end());
    w.schedule.sigmas.assign(sigmas.data.begin(), sigmas.data.end());
    w.vocab = vocab_from_blob(take("meta.vocab_utf8"));
    w.version = static_cast<uint32_t>(take("meta.weights_version").at(0));
    for (auto& [name, tensor] : all) {
        if (name.rfind("unet.", 0) == 0) {
            w.theta[name] = std::move(tensor);
        } else if (name.rfind("text.", 0) == 0) {
            w.phi[name] = std::move(tensor);
        } else if (name.rfind("ae.", 0) == 0) {
            w.frozen[name] = std::move(tensor);
        } else {
            throw FormatError(path + ": unexpected tensor '" + name + "'");
        }
    }
    return w;
}

void save_table(const ParamTable& table, const std::string& path) {
    write_container(table, path);
}

ParamTable load_table(const std::string& path) { return read_container(path); }

}  // namespace stylelab
