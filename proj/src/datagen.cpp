#include "ssr/datagen.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ssr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

const char* role_tag(DatasetRole role) {
    switch (role) {
        case DatasetRole::Train: return "train";
        case DatasetRole::Validation: return "validation";
        case DatasetRole::Test: return "test";
    }
    throw std::invalid_argument("unknown dataset role");
}

void check_probability(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument(std::string("ScenarioConfig: ") + name + " outside [0,1]");
    }
}

}  // namespace

std::string to_string(ActivityCase c) {
    switch (c) {
        case ActivityCase::Iid: return "iid";
        case ActivityCase::TwoGroup: return "two_group";
        case ActivityCase::GroupCorrelated: return "group_corr";
    }
    throw std::invalid_argument("unknown activity case");
}

ActivityCase activity_case_from_string(const std::string& s) {
    if (s == "iid") return ActivityCase::Iid;
    if (s == "two_group") return ActivityCase::TwoGroup;
    if (s == "group_corr") return ActivityCase::GroupCorrelated;
    throw std::invalid_argument("unknown activity case '" + s + "'");
}

void ScenarioConfig::validate() const {
    if (num_devices < 1) throw std::invalid_argument("ScenarioConfig: num_devices < 1");
    if (pilot_length < 1) throw std::invalid_argument("ScenarioConfig: pilot_length < 1");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("ScenarioConfig: sigma2 must be > 0");
    check_probability(p, "p");
    switch (activity_case) {
        case ActivityCase::Iid:
            break;
        case ActivityCase::TwoGroup:
            if (num_devices % 2 != 0) {
                throw std::invalid_argument("ScenarioConfig: TwoGroup needs even num_devices");
            }
            if (!(ratio_p1_p2 > 0.0)) {
                throw std::invalid_argument("ScenarioConfig: ratio_p1_p2 must be > 0");
            }
            check_probability(p1(), "p1");
            check_probability(p2(), "p2");
            break;
        case ActivityCase::GroupCorrelated:
            if (group_count < 1 || num_devices % group_count != 0) {
                throw std::invalid_argument(
                    "ScenarioConfig: group_count must divide num_devices");
            }
            if (!(p_u > 0.0 && p_u <= 1.0)) {
                throw std::invalid_argument("ScenarioConfig: p_u outside (0,1]");
            }
            check_probability(p_g(), "p_g");
            break;
    }
}

BinaryVec gen_activity(const ScenarioConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = cfg.num_devices;
    BinaryVec alpha(static_cast<std::size_t>(n), 0);
    switch (cfg.activity_case) {
        case ActivityCase::Iid: {
            for (int k = 0; k < n; ++k) alpha[k] = rng.bernoulli(cfg.p) ? 1 : 0;
            break;
        }
        case ActivityCase::TwoGroup: {
            const int half = n / 2;
            const double pa = cfg.p1();
            const double pb = cfg.p2();
            for (int k = 0; k < half; ++k) alpha[k] = rng.bernoulli(pa) ? 1 : 0;
            for (int k = half; k < n; ++k) alpha[k] = rng.bernoulli(pb) ? 1 : 0;
            break;
        }
        case ActivityCase::GroupCorrelated: {
            const int gs = cfg.group_size();
            const double pg = cfg.p_g();
            for (int g = 0; g < cfg.group_count; ++g) {
                const bool group_on = rng.bernoulli(pg);
                for (int k = 0; k < gs; ++k) {
                    // Device draws are consumed whether or not the group is on,
                    // keeping stream positions independent of the xi outcome.
                    const bool device_on = rng.bernoulli(cfg.p_u);
                    alpha[g * gs + k] = (group_on && device_on) ? 1 : 0;
                }
            }
            break;
        }
    }
    return alpha;
}

SplitComplexVector gen_channel(int n, Rng& rng) {
    if (n < 1) throw std::invalid_argument("gen_channel: n < 1");
    SplitComplexVector h = SplitComplexVector::zero(n);
    for (int k = 0; k < n; ++k) {
        auto [a, b] = rng.normal_pair();
        h.re[k] = a * kInvSqrt2;
        h.im[k] = b * kInvSqrt2;
    }
    return h;
}

Sample gen_sample(const ScenarioConfig& cfg, Rng& rng) {
    Sample s;
    s.alpha = gen_activity(cfg, rng);
    const SplitComplexVector h = gen_channel(cfg.num_devices, rng);
    s.x = SplitComplexVector::zero(cfg.num_devices);
    for (int k = 0; k < cfg.num_devices; ++k) {
        if (s.alpha[k]) {
            s.x.re[k] = h.re[k];
            s.x.im[k] = h.im[k];
        }
    }
    return s;
}

NoiseDraw gen_noise(int len, double sigma2, Rng& rng) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("gen_noise: sigma2 must be > 0");
    const double scale = std::sqrt(sigma2 / 2.0);
    NoiseDraw d;
    d.z = SplitComplexVector::zero(len);
    for (int k = 0; k < len; ++k) {
        auto [a, b] = rng.normal_pair();
        d.z.re[k] = a * scale;
        d.z.im[k] = b * scale;
    }
    return d;
}

Dataset build_dataset(const ScenarioConfig& cfg, DatasetRole role, std::size_t count) {
    cfg.validate();
    Dataset ds;
    ds.role = role;
    ds.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = Rng::from_stream(cfg.seed, role_tag(role), i);
        ds.samples.push_back(gen_sample(cfg, rng));
    }
    return ds;
}

DatasetBundle build_datasets(const ScenarioConfig& cfg, const DatasetSizes& sizes) {
    if (sizes.train == 0 || sizes.validation == 0 || sizes.test == 0) {
        throw std::invalid_argument("build_datasets: sizes must be positive");
    }
    DatasetBundle out;
    out.train = build_dataset(cfg, DatasetRole::Train, sizes.train);
    out.validation = build_dataset(cfg, DatasetRole::Validation, sizes.validation);
    out.test = build_dataset(cfg, DatasetRole::Test, sizes.test);
    return out;
}

namespace {

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
        throw std::runtime_error(std::string("dataset file truncated reading ") + field);
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double read_f64(std::istream& is, const char* field) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) {
        throw std::runtime_error(std::string("dataset file truncated reading ") + field);
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

constexpr char kDatasetMagic[5] = {'S', 'S', 'U', 'P', '1'};

}  // namespace

void write_dataset(const std::string& path, const Dataset& ds, ActivityCase activity_case) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os.write(kDatasetMagic, 5);
    const std::uint32_t n = ds.samples.empty() ? 0 : static_cast<std::uint32_t>(ds.signal_dim());
    write_u32(os, n);
    write_u32(os, static_cast<std::uint32_t>(ds.samples.size()));
    write_u32(os, static_cast<std::uint32_t>(activity_case));
    for (const Sample& s : ds.samples) {
        for (Eigen::Index k = 0; k < s.x.size(); ++k) {
            write_f64(os, s.x.re[k]);
            write_f64(os, s.x.im[k]);
        }
        os.write(reinterpret_cast<const char*>(s.alpha.data()),
                 static_cast<std::streamsize>(s.alpha.size()));
    }
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

LoadedDataset read_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    char magic[5];
    if (!is.read(magic, 5) || std::memcmp(magic, kDatasetMagic, 5) != 0) {
        throw std::runtime_error("dataset file has bad magic (expected SSUP1)");
    }
    const std::uint32_t n = read_u32(is, "N");
    const std::uint32_t count = read_u32(is, "count");
    const std::uint32_t case_id = read_u32(is, "case");
    if (case_id > 2) throw std::runtime_error("dataset file has invalid case id");
    LoadedDataset out;
    out.activity_case = static_cast<ActivityCase>(case_id);
    out.dataset.samples.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Sample s;
        s.x = SplitComplexVector::zero(n);
        for (std::uint32_t k = 0; k < n; ++k) {
            s.x.re[k] = read_f64(is, "sample re");
            s.x.im[k] = read_f64(is, "sample im");
        }
        s.alpha.resize(n);
        if (!is.read(reinterpret_cast<char*>(s.alpha.data()), n)) {
            throw std::runtime_error("dataset file truncated reading alpha");
        }
        for (auto a : s.alpha) {
            if (a > 1) throw std::runtime_error("dataset file has non-binary alpha entry");
        }
        out.dataset.samples.push_back(std::move(s));
    }
    return out;
}

}  // namespace ssr
