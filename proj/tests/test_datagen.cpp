#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ssr/datagen.hpp"

using namespace ssr;

namespace {

ScenarioConfig iid_config(int n, double p, std::uint64_t seed = 1) {
    ScenarioConfig cfg;
    cfg.num_devices = n;
    cfg.pilot_length = std::max(1, n / 4);
    cfg.activity_case = ActivityCase::Iid;
    cfg.p = p;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("iid activity with p = 0 is always silent") {
    ScenarioConfig cfg = iid_config(16, 0.0);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        for (auto a : gen_activity(cfg, rng)) CHECK(a == 0);
    }
}

TEST_CASE("iid activity concentrates at p over many draws") {
    ScenarioConfig cfg = iid_config(40, 0.1);
    Rng rng(17);
    std::size_t active = 0;
    const int draws = 100000;
    for (int trial = 0; trial < draws; ++trial) {
        for (auto a : gen_activity(cfg, rng)) active += a;
    }
    const double mean = static_cast<double>(active) / (40.0 * draws);
    CHECK(mean == doctest::Approx(0.1).epsilon(0.05));  // 0.1 +- 0.005
}

TEST_CASE("two-group split matches the requested ratio") {
    ScenarioConfig cfg;
    cfg.num_devices = 40;
    cfg.pilot_length = 12;
    cfg.activity_case = ActivityCase::TwoGroup;
    cfg.p = 0.1;
    cfg.ratio_p1_p2 = 4.0;
    cfg.seed = 5;
    cfg.validate();
    CHECK(cfg.p1() == doctest::Approx(0.16));
    CHECK(cfg.p2() == doctest::Approx(0.04));
    CHECK((cfg.p1() + cfg.p2()) / 2.0 == doctest::Approx(cfg.p));

    Rng rng(23);
    double first = 0.0;
    double second = 0.0;
    const int draws = 100000;
    for (int trial = 0; trial < draws; ++trial) {
        const BinaryVec alpha = gen_activity(cfg, rng);
        for (int k = 0; k < 20; ++k) first += alpha[static_cast<std::size_t>(k)];
        for (int k = 20; k < 40; ++k) second += alpha[static_cast<std::size_t>(k)];
    }
    const double ratio = first / second;
    CHECK(ratio > 4.0 * 0.9);
    CHECK(ratio < 4.0 * 1.1);
}

TEST_CASE("group-correlated activity with p_u = 1 activates whole groups") {
    ScenarioConfig cfg;
    cfg.num_devices = 30;
    cfg.pilot_length = 9;
    cfg.activity_case = ActivityCase::GroupCorrelated;
    cfg.p = 0.1;
    cfg.p_u = 1.0;
    cfg.group_count = 6;
    cfg.seed = 2;
    cfg.validate();
    CHECK(cfg.p_g() == doctest::Approx(0.1));

    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const BinaryVec alpha = gen_activity(cfg, rng);
        for (int g = 0; g < 6; ++g) {
            for (int k = 1; k < 5; ++k) {
                CHECK(alpha[static_cast<std::size_t>(g * 5 + k)] ==
                      alpha[static_cast<std::size_t>(g * 5)]);
            }
        }
    }
}

TEST_CASE("paper-shape group scenario resolves to groups of five") {
    ScenarioConfig cfg;
    cfg.num_devices = 200;
    cfg.pilot_length = 60;
    cfg.activity_case = ActivityCase::GroupCorrelated;
    cfg.group_count = 40;
    cfg.p = 0.1;
    cfg.p_u = 1.0;
    cfg.validate();
    CHECK(cfg.group_size() == 5);
}

TEST_CASE("invalid configurations are rejected") {
    ScenarioConfig cfg = iid_config(10, 1.5);
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    ScenarioConfig odd;
    odd.num_devices = 7;
    odd.activity_case = ActivityCase::TwoGroup;
    CHECK_THROWS_AS(odd.validate(), std::invalid_argument);

    ScenarioConfig grp;
    grp.num_devices = 10;
    grp.activity_case = ActivityCase::GroupCorrelated;
    grp.group_count = 3;  // does not divide 10
    grp.p_u = 1.0;
    CHECK_THROWS_AS(grp.validate(), std::invalid_argument);

    ScenarioConfig impossible;
    impossible.num_devices = 10;
    impossible.activity_case = ActivityCase::GroupCorrelated;
    impossible.group_count = 2;
    impossible.p = 0.5;
    impossible.p_u = 0.25;  // p_g would be 2
    CHECK_THROWS_AS(impossible.validate(), std::invalid_argument);
}

TEST_CASE("channel draws are CN(0,1)") {
    Rng rng(31);
    const int draws = 100000;
    double power = 0.0;
    double re_mean = 0.0;
    for (int trial = 0; trial < draws; ++trial) {
        const SplitComplexVector h = gen_channel(2, rng);
        power += h.re[0] * h.re[0] + h.im[0] * h.im[0];
        re_mean += h.re[0];
    }
    CHECK(power / draws == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(re_mean / draws) < 0.01);

    const SplitComplexVector single = gen_channel(1, rng);
    CHECK(single.size() == 1);
}

TEST_CASE("noise draws have the requested complex variance") {
    Rng rng(37);
    const int draws = 100000;
    double power = 0.0;
    double re_mean = 0.0;
    double im_mean = 0.0;
    for (int trial = 0; trial < draws; ++trial) {
        const NoiseDraw d = gen_noise(1, 0.1, rng);
        power += d.z.re[0] * d.z.re[0] + d.z.im[0] * d.z.im[0];
        re_mean += d.z.re[0];
        im_mean += d.z.im[0];
    }
    CHECK(power / draws == doctest::Approx(0.1).epsilon(0.03));
    CHECK(std::abs(re_mean / draws) < 0.005);
    CHECK(std::abs(im_mean / draws) < 0.005);
    CHECK_THROWS_AS(gen_noise(3, 0.0, rng), std::invalid_argument);
}

TEST_CASE("identical rng state reproduces identical draws") {
    Rng a(99);
    Rng b(99);
    const NoiseDraw da = gen_noise(8, 0.25, a);
    const NoiseDraw db = gen_noise(8, 0.25, b);
    CHECK((da.z.re - db.z.re).norm() == 0.0);
    CHECK((da.z.im - db.z.im).norm() == 0.0);
}

TEST_CASE("samples satisfy x = alpha * h") {
    ScenarioConfig cfg = iid_config(24, 0.3, 77);
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const Sample s = gen_sample(cfg, rng);
        CHECK(support_of(s.x, 0.0) == s.alpha);
        for (int k = 0; k < cfg.num_devices; ++k) {
            if (!s.alpha[static_cast<std::size_t>(k)]) {
                CHECK(s.x.re[k] == 0.0);
                CHECK(s.x.im[k] == 0.0);
            }
        }
    }
}

TEST_CASE("build_datasets produces the requested cardinalities deterministically") {
    ScenarioConfig cfg = iid_config(12, 0.2, 123);
    const DatasetSizes sizes{500, 50, 100};
    const DatasetBundle a = build_datasets(cfg, sizes);
    CHECK(a.train.size() == 500);
    CHECK(a.validation.size() == 50);
    CHECK(a.test.size() == 100);
    CHECK(a.train.role == DatasetRole::Train);
    CHECK(a.validation.role == DatasetRole::Validation);
    CHECK(a.test.role == DatasetRole::Test);

    const DatasetBundle b = build_datasets(cfg, sizes);
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        REQUIRE((a.train.samples[i].x.re - b.train.samples[i].x.re).norm() == 0.0);
        REQUIRE((a.train.samples[i].x.im - b.train.samples[i].x.im).norm() == 0.0);
        REQUIRE(a.train.samples[i].alpha == b.train.samples[i].alpha);
    }

    // Different roles come from different streams: compare the first draw.
    CHECK((a.train.samples[0].x.re - a.test.samples[0].x.re).norm() != 0.0);
}

TEST_CASE("dataset files round trip and reject truncation") {
    namespace fs = std::filesystem;
    ScenarioConfig cfg = iid_config(6, 0.4, 3);
    const Dataset ds = build_dataset(cfg, DatasetRole::Test, 25);
    const std::string path = (fs::temp_directory_path() / "ssr_dataset_test.ssup").string();
    write_dataset(path, ds, cfg.activity_case);

    const LoadedDataset loaded = read_dataset(path);
    CHECK(loaded.activity_case == ActivityCase::Iid);
    REQUIRE(loaded.dataset.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK((loaded.dataset.samples[i].x.re - ds.samples[i].x.re).norm() == 0.0);
        CHECK((loaded.dataset.samples[i].x.im - ds.samples[i].x.im).norm() == 0.0);
        CHECK(loaded.dataset.samples[i].alpha == ds.samples[i].alpha);
    }

    // Truncate and expect a structured error, not a crash.
    const auto full_size = fs::file_size(path);
    fs::resize_file(path, full_size / 2);
    CHECK_THROWS_AS(read_dataset(path), std::runtime_error);

    std::ofstream bad(path, std::ios::binary);
    bad << "NOTM1";
    bad.close();
    CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("magic"), std::runtime_error);
    fs::remove(path);
}
