#include "ssr/threshold.hpp"

#include <fstream>
#include <stdexcept>

namespace ssr {

BinaryVec hard_threshold(const Vec& alpha_tilde, double r) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("hard_threshold: r outside [0,1]");
    }
    BinaryVec out(static_cast<std::size_t>(alpha_tilde.size()));
    for (Eigen::Index k = 0; k < alpha_tilde.size(); ++k) {
        out[static_cast<std::size_t>(k)] = alpha_tilde[k] >= r ? 1 : 0;
    }
    return out;
}

double error_rate(const std::vector<BinaryVec>& alpha_hat,
                  const std::vector<BinaryVec>& alpha) {
    if (alpha_hat.size() != alpha.size() || alpha.empty()) {
        throw std::invalid_argument("error_rate: batch size mismatch or empty batch");
    }
    std::size_t disagreements = 0;
    std::size_t entries = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha_hat[i].size() != alpha[i].size()) {
            throw std::invalid_argument("error_rate: vector length mismatch");
        }
        for (std::size_t k = 0; k < alpha[i].size(); ++k) {
            if (alpha_hat[i][k] > 1 || alpha[i][k] > 1) {
                throw std::invalid_argument("error_rate: non-binary entry");
            }
            disagreements += alpha_hat[i][k] != alpha[i][k];
        }
        entries += alpha[i].size();
    }
    return static_cast<double>(disagreements) / static_cast<double>(entries);
}

ThresholdCalibration calibrate_threshold(const std::vector<Vec>& outputs,
                                         const std::vector<BinaryVec>& labels) {
    if (outputs.empty() || outputs.size() != labels.size()) {
        throw std::invalid_argument("calibrate_threshold: empty or mismatched calibration set");
    }
    ThresholdCalibration calib;
    calib.grid.reserve(99);
    for (int k = 1; k <= 99; ++k) {
        const double r = static_cast<double>(k) / 100.0;
        std::size_t disagreements = 0;
        std::size_t entries = 0;
        for (std::size_t i = 0; i < outputs.size(); ++i) {
            const Vec& out = outputs[i];
            const BinaryVec& truth = labels[i];
            if (static_cast<std::size_t>(out.size()) != truth.size()) {
                throw std::invalid_argument("calibrate_threshold: output/label length mismatch");
            }
            for (Eigen::Index j = 0; j < out.size(); ++j) {
                const std::uint8_t pred = out[j] >= r ? 1 : 0;
                disagreements += pred != truth[static_cast<std::size_t>(j)];
            }
            entries += truth.size();
        }
        const double pe = static_cast<double>(disagreements) / static_cast<double>(entries);
        calib.grid.emplace_back(r, pe);
    }
    calib.r_star = calib.grid.front().first;
    calib.pe_star = calib.grid.front().second;
    for (const auto& [r, pe] : calib.grid) {
        if (pe < calib.pe_star) {
            calib.pe_star = pe;
            calib.r_star = r;
        }
    }
    return calib;
}

BinaryVec detect(const DecoderParams& w, const SplitComplexVector& y, double r) {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::invalid_argument("detect: r outside [0,1]");
    }
    thread_local DecoderWorkspace ws;
    BinaryVec out(static_cast<std::size_t>(w.output_dim()));
    // Clipped scores live in [kOutputClip, 1 - kOutputClip]; outside that
    // band the decision is constant and the forward pass is skipped.
    if (r <= kOutputClip) {
        std::fill(out.begin(), out.end(), 1);
        return out;
    }
    if (r > 1.0 - kOutputClip) {
        std::fill(out.begin(), out.end(), 0);
        return out;
    }
    // sigmoid(z) >= r  <=>  z >= logit(r); thresholding the logits saves the
    // elementwise exp on the per-sample detection path.
    const double logit = std::log(r / (1.0 - r));
    const Vec& z = decoder_logits(w, y, ws);
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        out[static_cast<std::size_t>(k)] = z[k] >= logit ? 1 : 0;
    }
    return out;
}

void write_calibration_csv(const std::string& path, const ThresholdCalibration& calib) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << "r,P_E\n";
    char buf[64];
    for (const auto& [r, pe] : calib.grid) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.10g\n", r, pe);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "r_star,%.2f\npe_star,%.10g\n", calib.r_star, calib.pe_star);
    os << buf;
}

}  // namespace ssr
