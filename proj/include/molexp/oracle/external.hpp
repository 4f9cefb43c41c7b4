#pragma once

#include <string>
#include <vector>

#include "molexp/oracle/task.hpp"

namespace molexp::oracle {

// Line-oriented child-process oracle: one SMILES per line in, one decimal
// score in [0,1] per line out, flushed per line. The process is spawned on
// first use and owned by one run.
class ExternalOracle {
public:
    explicit ExternalOracle(ExternalOracleConfig config);
    ~ExternalOracle();

    ExternalOracle(const ExternalOracle&) = delete;
    ExternalOracle& operator=(const ExternalOracle&) = delete;

    double score(const std::string& smiles);
    std::vector<double> score_batch(const std::vector<std::string>& smiles);

private:
    void spawn();
    std::string read_line();

    ExternalOracleConfig config_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
};

}  // namespace molexp::oracle
