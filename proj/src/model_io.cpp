#include "tinyol/model_io.hpp"

#include <cstring>
#include <fstream>

namespace tinyol {

namespace {

class Writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u16(std::uint16_t v) {
        bytes_.push_back(static_cast<std::uint8_t>(v & 0xff));
        bytes_.push_back(static_cast<std::uint8_t>(v >> 8));
    }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    void magic(const char m[4]) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(m[i]));
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint8_t u8() {
        need(1, "u8");
        return bytes_[off_++];
    }
    std::uint16_t u16() {
        need(2, "u16");
        std::uint16_t v = static_cast<std::uint16_t>(bytes_[off_] | (bytes_[off_ + 1] << 8));
        off_ += 2;
        return v;
    }
    float f32() {
        need(4, "f32");
        std::uint32_t bits = 0;
        for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(bytes_[off_ + i]) << (8 * i);
        off_ += 4;
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    void expect_magic(const char m[4]) {
        need(4, "magic");
        for (int i = 0; i < 4; ++i)
            if (bytes_[off_ + i] != static_cast<std::uint8_t>(m[i]))
                throw FormatError(std::string("bad magic, expected ") + std::string(m, 4), off_);
        off_ += 4;
    }
    void expect_done() {
        if (off_ != bytes_.size()) throw FormatError("trailing bytes", off_);
    }
    std::size_t offset() const { return off_; }

private:
    void need(std::size_t n, const char* what) {
        if (off_ + n > bytes_.size())
            throw FormatError(std::string("truncated payload reading ") + what, off_);
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t off_ = 0;
};

void write_matrix(Writer& w, const Mat& W, const Vec& b) {
    for (float v : W.v) w.f32(v);
    for (float v : b) w.f32(v);
}

}  // namespace

std::vector<std::uint8_t> save_model(const FrozenModel& m) {
    Writer w;
    w.magic("TOLM");
    w.u8(1);
    w.u8(static_cast<std::uint8_t>(m.layer_count()));
    w.u8(static_cast<std::uint8_t>(m.embedding_index()));
    w.u8(0);
    for (std::size_t i = 0; i < m.layer_count(); ++i) {
        const Layer& l = m.layer(i);
        w.u16(static_cast<std::uint16_t>(l.W.cols));
        w.u16(static_cast<std::uint16_t>(l.W.rows));
        w.u8(static_cast<std::uint8_t>(l.act));
        write_matrix(w, l.W, l.b);
    }
    return w.take();
}

FrozenModel load_model(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    r.expect_magic("TOLM");
    std::uint8_t version = r.u8();
    if (version != 1) throw FormatError("unsupported version " + std::to_string(version), r.offset() - 1);
    std::uint8_t layer_count = r.u8();
    std::uint8_t embedding_index = r.u8();
    r.u8();  // reserved
    if (layer_count == 0) throw FormatError("layer_count must be positive", 5);

    std::vector<Layer> layers;
    for (std::size_t i = 0; i < layer_count; ++i) {
        std::size_t header_off = r.offset();
        std::uint16_t in_dim = r.u16();
        std::uint16_t out_dim = r.u16();
        std::uint8_t act = r.u8();
        if (in_dim == 0 || out_dim == 0) throw FormatError("zero layer dimension", header_off);
        if (act > 2) throw FormatError("unknown activation " + std::to_string(act), header_off + 4);
        if (!layers.empty() && layers.back().W.rows != in_dim)
            throw FormatError("dimension chain violation at layer " + std::to_string(i), header_off);
        Layer l;
        l.W = Mat(out_dim, in_dim);
        l.act = static_cast<Activation>(act);
        for (float& v : l.W.v) v = r.f32();
        l.b.resize(out_dim);
        for (float& v : l.b) v = r.f32();
        layers.push_back(std::move(l));
    }
    r.expect_done();
    if (embedding_index >= layer_count) throw FormatError("embedding_index out of range", 6);
    return FrozenModel(std::move(layers), embedding_index);
}

std::vector<std::uint8_t> save_preproc(const Preproc& p) {
    Writer w;
    w.magic("TOLP");
    w.u8(1);
    for (int i = 0; i < 3; ++i) w.f32(p.pca_mean[i]);
    for (int i = 0; i < 3; ++i) w.f32(p.pca_axis[i]);
    w.f32(p.minmax_lo);
    w.f32(p.minmax_hi);
    return w.take();
}

Preproc load_preproc(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    r.expect_magic("TOLP");
    std::uint8_t version = r.u8();
    if (version != 1) throw FormatError("unsupported version " + std::to_string(version), 4);
    Preproc p;
    p.pca_mean.resize(3);
    p.pca_axis.resize(3);
    for (int i = 0; i < 3; ++i) p.pca_mean[i] = r.f32();
    for (int i = 0; i < 3; ++i) p.pca_axis[i] = r.f32();
    std::size_t bounds_off = r.offset();
    p.minmax_lo = r.f32();
    p.minmax_hi = r.f32();
    r.expect_done();
    if (!(p.minmax_hi > p.minmax_lo)) throw FormatError("minmax_hi <= minmax_lo", bounds_off);
    return p;
}

std::vector<std::uint8_t> save_head(const RegressionHead& h) {
    Writer w;
    w.magic("TOLH");
    w.u8(1);
    w.u8(0);  // regression
    w.u16(static_cast<std::uint16_t>(h.out_dim()));
    w.u16(static_cast<std::uint16_t>(h.in_dim()));
    w.f32(h.alpha());
    write_matrix(w, h.weights(), h.bias());
    return w.take();
}

std::vector<std::uint8_t> save_head(const SoftmaxHead& h) {
    Writer w;
    w.magic("TOLH");
    w.u8(1);
    w.u8(1);  // softmax
    w.u8(static_cast<std::uint8_t>(h.class_count()));
    w.u8(static_cast<std::uint8_t>(h.feature_dim()));
    w.f32(h.alpha());
    write_matrix(w, h.weights(), h.bias());
    return w.take();
}

namespace {
void read_head_prefix(Reader& r, std::uint8_t expected_kind) {
    r.expect_magic("TOLH");
    std::uint8_t version = r.u8();
    if (version != 1) throw FormatError("unsupported version " + std::to_string(version), 4);
    std::uint8_t kind = r.u8();
    if (kind != expected_kind)
        throw FormatError("head kind " + std::to_string(kind) + ", expected " +
                              std::to_string(expected_kind),
                          5);
}
}  // namespace

RegressionHead load_regression_head(const std::vector<std::uint8_t>& bytes, GradRule rule) {
    Reader r(bytes);
    read_head_prefix(r, 0);
    std::uint16_t out_dim = r.u16();
    std::uint16_t in_dim = r.u16();
    if (out_dim == 0 || in_dim == 0) throw FormatError("zero head dimension", 6);
    float alpha = r.f32();
    Mat W(out_dim, in_dim);
    for (float& v : W.v) v = r.f32();
    Vec b(out_dim);
    for (float& v : b) v = r.f32();
    r.expect_done();
    return RegressionHead(std::move(W), std::move(b), alpha, rule);
}

SoftmaxHead load_softmax_head(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    read_head_prefix(r, 1);
    std::uint8_t k = r.u8();
    std::uint8_t d = r.u8();
    if (k == 0 || d == 0) throw FormatError("zero head dimension", 6);
    float alpha = r.f32();
    Mat W(k, d);
    for (float& v : W.v) v = r.f32();
    Vec b(k);
    for (float& v : b) v = r.f32();
    r.expect_done();
    return SoftmaxHead(std::move(W), std::move(b), alpha);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary | std::ios::ate);
    if (!f) throw IoError("cannot open: " + path);
    std::streamsize size = f.tellg();
    f.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    f.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!f) throw IoError("read failed: " + path);
    return bytes;
}

}  // namespace tinyol
