#include "tinyol/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "tinyol/model_io.hpp"

namespace tinyol {

std::string StepReport::csv_header() {
    return "step,mode,mse,loss,predicted_class,true_class,k";
}

std::string StepReport::csv_row() const {
    std::ostringstream ss;
    ss << step << ',' << (mode == PipelineMode::FineTune ? "fine-tune" : "classify") << ',';
    if (mse) ss << *mse;
    ss << ',';
    if (loss) ss << *loss;
    ss << ',';
    if (predicted_class) ss << *predicted_class;
    ss << ',';
    if (true_class) ss << *true_class;
    ss << ',' << k;
    return ss.str();
}

Pipeline::Pipeline(FrozenModel model, Preproc preproc, RegressionHead head, bool learning_enabled)
    : model_(std::move(model)),
      preproc_(std::move(preproc)),
      mode_(PipelineMode::FineTune),
      head_(std::move(head)),
      stats_(kWindowLen),
      learning_enabled_(learning_enabled) {}

Pipeline::Pipeline(FrozenModel model, Preproc preproc, SoftmaxHead head, bool learning_enabled)
    : model_(std::move(model)),
      preproc_(std::move(preproc)),
      mode_(PipelineMode::Classify),
      head_(std::move(head)),
      stats_(std::get<SoftmaxHead>(head_).feature_dim()),
      learning_enabled_(learning_enabled) {}

void Pipeline::set_head_alpha(float alpha) {
    std::visit([alpha](auto& h) { h.set_alpha(alpha); }, head_);
}

const RegressionHead& Pipeline::regression_head() const {
    return std::get<RegressionHead>(head_);
}

const SoftmaxHead& Pipeline::softmax_head() const {
    return std::get<SoftmaxHead>(head_);
}

StepReport Pipeline::process_sample(const StreamWindow& w) {
    StepReport report;
    report.step = step_++;
    report.mode = mode_;

    Vec x = preproc_.apply(w);

    if (mode_ == PipelineMode::FineTune) {
        auto& head = std::get<RegressionHead>(head_);
        Vec a = model_.forward_truncated(x);
        Vec x_hat = head.predict(a);
        report.mse = reconstruction_error(x, x_hat);
        report.k = head.out_dim();
        if (learning_enabled_) {
            // self-supervised: the ground truth is the input itself
            report.loss = head.update(a, x);
        }
        return report;
    }

    auto& head = std::get<SoftmaxHead>(head_);
    Vec z = model_.encode(x);
    float e = reconstruction_error(x, model_.forward(x));
    Vec f_raw = z;
    f_raw.push_back(e);
    report.mse = e;

    stats_.update(f_raw);
    Vec f = stats_.standardize(f_raw);

    int label = w.mode;
    if (label >= 0) {
        auto y = static_cast<std::size_t>(label);
        if (y > head.class_count())
            throw DomainError("label " + std::to_string(y) + " skips unseen classes (k=" +
                              std::to_string(head.class_count()) + ")");
        if (y == head.class_count()) head.add_class();
    }

    Vec p = head.predict(f);
    auto predicted = static_cast<int>(
        std::max_element(p.begin(), p.end()) - p.begin());
    report.predicted_class = predicted;
    report.k = head.class_count();

    if (label >= 0) {
        report.true_class = label;
        // metrics before the weight update
        confusion_.record(static_cast<std::size_t>(predicted), static_cast<std::size_t>(label));
        if (learning_enabled_)
            report.loss = head.update(f, static_cast<std::size_t>(label));
    }
    return report;
}

std::size_t Pipeline::state_bytes() const {
    std::size_t head_bytes = std::visit([](const auto& h) { return save_head(h).size(); }, head_);
    return head_bytes + stats_.serialize().size() + sizeof(step_) + sizeof(learning_enabled_);
}

TimingSummary bench_iteration(Pipeline& p, const std::vector<StreamWindow>& windows,
                              BenchMode mode) {
    if (windows.size() < 100) throw DomainError("bench_iteration needs at least 100 windows");
    bool was_learning = p.learning_enabled();
    p.set_learning(mode == BenchMode::Online);

    std::vector<double> times_us;
    times_us.reserve(windows.size());
    for (const StreamWindow& w : windows) {
        auto t0 = std::chrono::steady_clock::now();
        p.process_sample(w);
        auto t1 = std::chrono::steady_clock::now();
        times_us.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    p.set_learning(was_learning);

    std::sort(times_us.begin(), times_us.end());
    TimingSummary s;
    s.minimum_us = times_us.front();
    s.maximum_us = times_us.back();
    std::size_t n = times_us.size();
    s.median_us = n % 2 == 1 ? times_us[n / 2] : 0.5 * (times_us[n / 2 - 1] + times_us[n / 2]);
    double sum = 0.0;
    for (double t : times_us) sum += t;
    s.average_us = sum / static_cast<double>(n);
    return s;
}

}  // namespace tinyol
