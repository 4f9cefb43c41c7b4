#include <algorithm>

#include "molexp/oracle/scoreboard.hpp"

namespace molexp::oracle {

void ScoreBoard::append(RunRecord record) {
    ++scored_;
    if (record.valid) {
        ++valid_;
        for (std::size_t t = 0; t < max_sims_.size(); ++t) {
            max_sims_[t] = std::max(max_sims_[t], record.sims[t]);
            sum_sims_[t] += record.sims[t];
        }
        if (unique_set_.insert(record.canonical).second) unique_list_.push_back(record.canonical);
    }
    records_.push_back(std::move(record));
}

std::vector<double> ScoreBoard::per_target_mean() const {
    std::vector<double> mean(sum_sims_.size(), 0.0);
    if (scored_ == 0) return mean;
    // Invalid molecules contribute similarity 0 and stay in the denominator.
    for (std::size_t t = 0; t < sum_sims_.size(); ++t)
        mean[t] = sum_sims_[t] / static_cast<double>(scored_);
    return mean;
}

double ScoreBoard::benchmark_score(MetricMode mode) const {
    double product = 1.0;
    if (mode == MetricMode::Max) {
        for (double m : max_sims_) product *= m;
    } else {
        for (double m : per_target_mean()) product *= m;
    }
    return product;
}

double benchmark_score(const ScoreBoard& board, const TaskSpec& task) {
    return board.benchmark_score(task.metric_mode);
}

int diversity_filter(const std::string& canonical, ScoreBoard& board) {
    const bool novel = board.unique_set_.insert(canonical).second;
    if (novel) board.unique_list_.push_back(canonical);
    return novel ? 1 : 0;
}

}  // namespace molexp::oracle
