#include "ssr/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace ssr {

namespace {

constexpr char kMagic[5] = {'S', 'S', 'A', 'E', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t read_u32(std::istream& is, const char* field) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) {
        throw CheckpointError(std::string("checkpoint truncated reading ") + field);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double read_f64(std::istream& is, const char* field) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) {
        throw CheckpointError(std::string("checkpoint truncated reading ") + field);
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void write_matrix_row_major(std::ostream& os, const Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(os, m(r, c));
    }
}

void write_vector(std::ostream& os, const Vec& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) write_f64(os, v[k]);
}

Mat read_matrix_row_major(std::istream& is, Eigen::Index rows, Eigen::Index cols,
                          const char* field) {
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = read_f64(is, field);
    }
    return m;
}

Vec read_vector(std::istream& is, Eigen::Index len, const char* field) {
    Vec v(len);
    for (Eigen::Index k = 0; k < len; ++k) v[k] = read_f64(is, field);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os.write(kMagic, 5);
    write_u32(os, kVersion);
    write_u32(os, static_cast<std::uint32_t>(ckpt.num_devices()));
    write_u32(os, static_cast<std::uint32_t>(ckpt.pilot_length()));
    write_u32(os, static_cast<std::uint32_t>(ckpt.hidden_width()));
    write_matrix_row_major(os, ckpt.matrix.re);
    write_matrix_row_major(os, ckpt.matrix.im);
    write_matrix_row_major(os, ckpt.decoder.theta1);
    write_vector(os, ckpt.decoder.b1);
    write_matrix_row_major(os, ckpt.decoder.theta2);
    write_vector(os, ckpt.decoder.b2);
    write_matrix_row_major(os, ckpt.decoder.theta3);
    write_vector(os, ckpt.decoder.b3);
    write_f64(os, ckpt.r_star);
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("cannot open '" + path + "'");
    char magic[5];
    if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0) {
        throw CheckpointError("checkpoint has bad magic (expected SSAE1)");
    }
    const std::uint32_t version = read_u32(is, "version");
    if (version != kVersion) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const std::uint32_t n = read_u32(is, "N");
    const std::uint32_t pilot_len = read_u32(is, "L");
    const std::uint32_t q = read_u32(is, "Q");
    if (n == 0 || pilot_len == 0 || q == 0) {
        throw CheckpointError("checkpoint has zero dimension in header");
    }

    Checkpoint ckpt;
    ckpt.matrix.re = read_matrix_row_major(is, pilot_len, n, "a_re");
    ckpt.matrix.im = read_matrix_row_major(is, pilot_len, n, "a_im");
    ckpt.decoder.theta1 = read_matrix_row_major(is, q, 2 * pilot_len, "theta1");
    ckpt.decoder.b1 = read_vector(is, q, "b1");
    ckpt.decoder.theta2 = read_matrix_row_major(is, q, q, "theta2");
    ckpt.decoder.b2 = read_vector(is, q, "b2");
    ckpt.decoder.theta3 = read_matrix_row_major(is, n, q, "theta3");
    ckpt.decoder.b3 = read_vector(is, n, "b3");
    ckpt.r_star = read_f64(is, "r_star");
    return ckpt;
}

}  // namespace ssr
