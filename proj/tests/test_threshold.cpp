#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ssr/rng.hpp"
#include "ssr/threshold.hpp"

using namespace ssr;

TEST_CASE("hard_threshold basics") {
    Vec scores(3);
    scores << 0.2, 0.8, 0.5;
    CHECK(hard_threshold(scores, 0.0) == BinaryVec{1, 1, 1});
    CHECK(hard_threshold(scores, 0.5) == BinaryVec{0, 1, 1});  // boundary inclusive
    CHECK_THROWS_AS(hard_threshold(scores, 1.5), std::invalid_argument);
}

TEST_CASE("hard_threshold matches a scalar loop oracle") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Vec scores(12);
        for (int k = 0; k < 12; ++k) scores[k] = rng.uniform();
        const double r = rng.uniform();
        const BinaryVec out = hard_threshold(scores, r);
        for (int k = 0; k < 12; ++k) {
            CHECK(out[static_cast<std::size_t>(k)] == (scores[k] >= r ? 1 : 0));
        }
    }
}

TEST_CASE("error_rate arithmetic and validation") {
    CHECK(error_rate({{1, 0, 1, 0}}, {{1, 0, 1, 0}}) == 0.0);
    CHECK(error_rate({{1, 1, 1, 0}}, {{1, 0, 1, 0}}) == doctest::Approx(0.25));
    CHECK_THROWS_AS(error_rate({{1, 2}}, {{1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(error_rate({{1, 0}}, {{1}}), std::invalid_argument);
    CHECK_THROWS_AS(error_rate({}, {}), std::invalid_argument);
}

TEST_CASE("error_rate equals hamming distance over N * I") {
    Rng rng(7);
    std::vector<BinaryVec> pred, truth;
    std::size_t distance = 0;
    for (int i = 0; i < 100; ++i) {
        BinaryVec p(9), t(9);
        for (int k = 0; k < 9; ++k) {
            p[static_cast<std::size_t>(k)] = rng.bernoulli(0.5);
            t[static_cast<std::size_t>(k)] = rng.bernoulli(0.5);
            distance += p[static_cast<std::size_t>(k)] != t[static_cast<std::size_t>(k)];
        }
        pred.push_back(p);
        truth.push_back(t);
    }
    CHECK(error_rate(pred, truth) ==
          doctest::Approx(static_cast<double>(distance) / 900.0).epsilon(1e-15));
}

TEST_CASE("calibration on a perfectly separated set picks r = 0.11") {
    std::vector<Vec> outputs;
    std::vector<BinaryVec> labels;
    for (int i = 0; i < 10; ++i) {
        Vec out(4);
        out << 0.9, 0.1, 0.9, 0.1;
        outputs.push_back(out);
        labels.push_back({1, 0, 1, 0});
    }
    const ThresholdCalibration calib = calibrate_threshold(outputs, labels);
    CHECK(calib.pe_star == 0.0);
    CHECK(calib.r_star == doctest::Approx(0.11));
    CHECK(calib.grid.size() == 99);
}

TEST_CASE("calibration with all-zero labels pushes the threshold high") {
    Rng rng(11);
    std::vector<Vec> outputs;
    std::vector<BinaryVec> labels;
    for (int i = 0; i < 200; ++i) {
        Vec out(5);
        for (int k = 0; k < 5; ++k) out[k] = rng.uniform();
        outputs.push_back(out);
        labels.push_back(BinaryVec(5, 0));
    }
    const ThresholdCalibration calib = calibrate_threshold(outputs, labels);
    CHECK(calib.r_star == doctest::Approx(0.99));
}

TEST_CASE("calibration grid matches a brute-force recomputation") {
    Rng rng(13);
    std::vector<Vec> outputs;
    std::vector<BinaryVec> labels;
    for (int i = 0; i < 40; ++i) {
        Vec out(6);
        BinaryVec lab(6);
        for (int k = 0; k < 6; ++k) {
            out[k] = rng.uniform();
            lab[static_cast<std::size_t>(k)] = rng.bernoulli(0.3);
        }
        outputs.push_back(out);
        labels.push_back(lab);
    }
    const ThresholdCalibration calib = calibrate_threshold(outputs, labels);
    for (const auto& [r, pe] : calib.grid) {
        std::vector<BinaryVec> pred;
        pred.reserve(outputs.size());
        for (const auto& out : outputs) pred.push_back(hard_threshold(out, r));
        CHECK(pe == doctest::Approx(error_rate(pred, labels)).epsilon(1e-15));
    }
    // pe_star is the grid minimum and no worse than the default threshold.
    double pe_half = 0.0;
    for (const auto& [r, pe] : calib.grid) {
        CHECK(calib.pe_star <= pe);
        if (r == doctest::Approx(0.5)) pe_half = pe;
    }
    CHECK(calib.pe_star <= pe_half);
}

TEST_CASE("predicted-positive count is non-increasing in r") {
    Rng rng(17);
    Vec out(50);
    for (int k = 0; k < 50; ++k) out[k] = rng.uniform();
    std::size_t prev = 51;
    for (int step = 0; step <= 20; ++step) {
        const BinaryVec pred = hard_threshold(out, step / 20.0);
        std::size_t count = 0;
        for (auto v : pred) count += v;
        CHECK(count <= prev);
        prev = count;
    }
}

TEST_CASE("detect composes decoder and threshold") {
    Rng rng(19);
    const DecoderParams w = DecoderParams::glorot(7, 3, 5, rng);
    for (int trial = 0; trial < 100; ++trial) {
        SplitComplexVector y = SplitComplexVector::zero(3);
        for (int l = 0; l < 3; ++l) {
            y.re[l] = rng.normal();
            y.im[l] = rng.normal();
        }
        const double r = 0.3 + 0.4 * rng.uniform();
        CHECK(detect(w, y, r) == hard_threshold(decoder_forward(w, y), r));
    }

    const DecoderParams zero = DecoderParams::zeros(4, 2, 3);
    CHECK(detect(zero, SplitComplexVector::zero(2), 0.5) == BinaryVec{1, 1, 1, 1});
}

TEST_CASE("calibration report is written as CSV") {
    namespace fs = std::filesystem;
    std::vector<Vec> outputs{(Vec(2) << 0.9, 0.2).finished()};
    std::vector<BinaryVec> labels{{1, 0}};
    const ThresholdCalibration calib = calibrate_threshold(outputs, labels);
    const std::string path = (fs::temp_directory_path() / "ssr_calib_test.csv").string();
    write_calibration_csv(path, calib);
    std::ifstream is(path);
    std::string header;
    std::getline(is, header);
    CHECK(header == "r,P_E");
    int lines = 0;
    std::string line;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 99 + 2);  // grid rows plus the two summary rows
    fs::remove(path);
}
